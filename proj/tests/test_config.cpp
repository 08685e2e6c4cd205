#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bifluid/config.hpp"
#include "bifluid/expression.hpp"
#include "bifluid/io.hpp"
#include "support.hpp"

using namespace bifluid;
using testing::pi;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::InvalidArgument;
}

std::string parse_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("expression arithmetic and precedence") {
  CHECK(Expression::parse("1 + 2*3")(0) == 7.0);
  CHECK(Expression::parse("(1 + 2)*3")(0) == 9.0);
  CHECK(Expression::parse("2^3^2")(0) == 512.0);
  CHECK(Expression::parse("-2^2")(0) == -4.0);
  CHECK(Expression::parse("2*-x")(3) == -6.0);
  CHECK(Expression::parse("8/4/2")(0) == 1.0);
  CHECK(Expression::parse("1.5e-3")(0) == 1.5e-3);
  CHECK(Expression::parse("x^2")(0.5) == 0.25);
}

TEST_CASE("expression functions and constants") {
  CHECK(Expression::parse("sin(pi*x)")(0.5) == doctest::Approx(1.0));
  CHECK(Expression::parse("cos(2*pi*x)")(0.5) == doctest::Approx(-1.0));
  CHECK(Expression::parse("exp(x)")(1.0) == doctest::Approx(std::numbers::e));
  CHECK(Expression::parse("e")(0) == doctest::Approx(std::numbers::e));
  CHECK(Expression::parse("1 + 0.5*sin(2*pi*x)")(0.25) == doctest::Approx(1.5));
  CHECK(Expression::parse(" 3 ").text() == " 3 ");
}

TEST_CASE("expression errors carry the column") {
  const char* bad[] = {"", "1 +", "sin(x", "tan(x)", "2 3", "x $ 1", "()"};
  for (const char* text : bad) {
    try {
      Expression::parse(text);
      FAIL("expected parse error for '" << text << "'");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(contains(e.what(), "column"));
    }
  }
  try {
    Expression::parse("x $ 1");
  } catch (const Error& e) {
    CHECK(contains(e.what(), "column 3"));
  }
}

TEST_CASE("defaults parse from an empty file with a preset") {
  const RunConfig c = parse_config("preset = smooth\n");
  CHECK(c.n == 64);
  CHECK(c.params.M0 == 1.0);
  CHECK(c.initial.rho0[0] == "1 + 0.5*sin(2*pi*x)");
  CHECK_FALSE(c.stride.has_value());
  CHECK(c.control.scheme.convection == Convection::Upwind);
}

TEST_CASE("sections, comments and explicit keys") {
  const RunConfig c = parse_config(R"cfg(
# leading comment
[params]
a = 2.5          # drag
mu21 = 0.5
[grid]
n = 128
[control]
convection = central
viscous_solve = block
drag_implicit = false
[initial]
preset = equilibrium
u01 = "0.1*sin(pi*x)"  # overrides the preset
[output]
stride = 4
seed = 7
directory = "out # not a comment"
[mms]
resolutions = 16, 32
)cfg");
  CHECK(c.params.a == 2.5);
  CHECK(c.params.M0 == doctest::Approx(0.75));
  CHECK(c.n == 128);
  CHECK(c.control.scheme.convection == Convection::Central);
  CHECK(c.control.scheme.viscous == ViscousSolve::Block);
  CHECK_FALSE(c.control.scheme.drag_implicit);
  CHECK(c.initial.u0[0] == "0.1*sin(pi*x)");
  CHECK(c.initial.u0[1] == "0");
  CHECK(c.stride == 4);
  CHECK(c.seed == 7);
  CHECK(c.directory == "out # not a comment");
  CHECK(c.mms.resolutions == std::vector<int>{16, 32});
}

TEST_CASE("parse errors name the line") {
  CHECK(parse_code("preset = smooth\nbogus = 1\n") == ErrorCode::ParseError);
  CHECK(contains(parse_message("preset = smooth\nbogus = 1\n"), "line 2"));
  CHECK(contains(parse_message("[grid]\npreset = smooth\n"), "belongs to [initial]"));
  CHECK(contains(parse_message("preset = smooth\nn = 8\nn = 16\n"), "duplicate key 'n'"));
  CHECK(contains(parse_message("[nowhere]\n"), "unknown section"));
  CHECK(contains(parse_message("[grid\n"), "unterminated section"));
  CHECK(contains(parse_message("preset smooth\n"), "expected 'key = value'"));
  CHECK(contains(parse_message("u01 = \"sin(x)\n"), "unterminated string"));
  CHECK(contains(parse_message("preset = smooth\nu01 = sin(x\n"), "u01"));
}

TEST_CASE("validation errors name the key") {
  CHECK(parse_message("preset = smooth\ngamma1 = 1\n") == "gamma1: adiabatic exponent must exceed 1");
  CHECK(parse_code("preset = smooth\ngamma1 = 1\n") == ErrorCode::AdiabaticExponentTooSmall);
  CHECK(parse_code("preset = smooth\na = 0\n") == ErrorCode::DragNotPositive);
  CHECK(contains(parse_message("preset = smooth\nK2 = -1\n"), "K2"));
  CHECK(parse_code("preset = smooth\nmu22 = -1\n") == ErrorCode::NotPositiveDefinite);
  CHECK(parse_code("preset = smooth\nmu12 = 0.1\ntriangular_enforced = true\n") == ErrorCode::ValidationError);
  CHECK(contains(parse_message("preset = smooth\nn = 2\n"), "n:"));
  CHECK(contains(parse_message("preset = smooth\nn = 2.5\n"), "expected an integer"));
  CHECK(contains(parse_message("preset = smooth\ncfl_safety = 2\n"), "cfl_safety"));
  CHECK(contains(parse_message("preset = smooth\nenergy = maybe\n"), "true or false"));
  CHECK(contains(parse_message("preset = smooth\nconvection = sideways\n"), "convection"));
  CHECK(contains(parse_message("preset = nope\n"), "known: equilibrium"));
  CHECK(contains(parse_message("rho01 = 1\n"), "u01: missing"));
  CHECK(contains(parse_message("preset = smooth\nrho01 = 1/x\n"), "not finite"));
  CHECK(contains(parse_message("preset = smooth\nmodes = 4, 8\n"), "equal length"));
  CHECK(contains(parse_message("preset = smooth\nstride = 0\n"), "stride"));
}

TEST_CASE("stride accepts auto") {
  CHECK_FALSE(parse_config("preset = smooth\nstride = auto\n").stride.has_value());
  CHECK(parse_config("preset = smooth\nstride = 3\n").stride == 3);
}

TEST_CASE("write_config round-trips") {
  const RunConfig a = parse_config("preset = counterflow\nmu21 = 0.3\nstride = 9\nseed = 123\neps = 0, 0.5\n");
  const RunConfig b = parse_config(write_config(a));
  CHECK(a == b);
  CHECK(write_config(b) == write_config(a));
}

TEST_CASE("property: write_config round-trips random configs") {
  testing::Gen gen(61);
  const auto names = preset_names();
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c = parse_config("preset = " + names[gen.integer(0, static_cast<int>(names.size()) - 1)] + "\n");
    c.params = gen.params(trial % 2 == 0);
    c.n = gen.integer(4, 1000);
    c.control.cfl_safety = gen.uniform(0.01, 1.0);
    c.control.dt_max = gen.uniform(1e-5, 1.0);
    c.control.t_end = gen.uniform(1e-3, 5.0);
    c.control.scheme.drag_implicit = trial % 3 == 0;
    c.control.scheme.convection = trial % 2 ? Convection::Central : Convection::Upwind;
    c.monitors.lagrangian = trial % 4 == 0;
    c.monitors.tol_scale = gen.uniform(0.1, 10);
    if (trial % 2) c.stride = gen.integer(1, 100);
    c.seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30)) << 20;
    c.uniqueness.eps = {0.0, gen.uniform(0, 1)};
    const RunConfig back = parse_config(write_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("presets are all valid") {
  for (const auto& name : preset_names()) {
    const InitialSpec s = preset(name);
    const InitialData d = build_initial(s);
    for (int i = 0; i < 2; ++i) {
      CHECK(d.u0[i](0.0) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
      CHECK(d.rho0[i](0.5) > 0.0);
    }
  }
  CHECK(preset_names().size() == 5);
  CHECK_THROWS_AS(preset("missing"), Error);
}

TEST_CASE("smooth preset matches the closed-form profiles") {
  const InitialData d = build_initial(preset("smooth"));
  const InitialData ref = testing::smooth_data();
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (int i = 0; i < 2; ++i) {
      CHECK(d.rho0[i](x) == doctest::Approx(ref.rho0[i](x)).epsilon(1e-15));
      CHECK(d.u0[i](x) == doctest::Approx(ref.u0[i](x)).epsilon(1e-15).scale(1.0));
    }
  }
}

TEST_CASE("perturbation directions") {
  UniquenessBlock b;
  const InitialData d = build_perturbation(b, 0);
  CHECK(d.u0[0](0.5) == doctest::Approx(1.0));
  CHECK(d.rho0[0](0.5) == 0.0);
  b.delta = "random";
  const InitialData r1 = build_perturbation(b, 5), r2 = build_perturbation(b, 5), r3 = build_perturbation(b, 6);
  CHECK(r1.u0[0](0.3) == r2.u0[0](0.3));
  CHECK(r1.u0[0](0.3) != r3.u0[0](0.3));
  CHECK(r1.u0[1](0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(r1.u0[1](1.0) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(pi)) == pi);
}

TEST_CASE("csv writer") {
  CsvWriter w({"a", "b", "c"});
  w.cell(1.5).cell(3).cell(std::string("x")).end_row();
  w.empty().cell(true).cell(false).end_row();
  CHECK(w.str() == "a,b,c\n1.5,3,x\n,true,false\n");
}

TEST_CASE("estimates csv leaves missing values empty") {
  EstimateReport r;
  EstimateEntry e;
  e.name = "rho1_sup";
  e.observed = 2.0;
  e.pass = true;
  r.add(e);
  const std::string csv = estimates_csv(r);
  CHECK(contains(csv, "rho1_sup,,2,,true"));
  CHECK(contains(estimates_text(r), "rho1_sup"));
}

TEST_CASE("fields csv has one row per node and level") {
  State s = sample_initial(testing::smooth_data(), Grid::uniform(4));
  State t = s;
  t.t = 0.5;
  const std::string csv = fields_csv({s, t});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 5);
  CHECK(contains(csv, "0.5,1,"));
}

TEST_CASE("mass fields csv covers both charts") {
  const State s = sample_initial(testing::smooth_data(), Grid::uniform(8));
  const std::string csv = mass_fields_csv({s});
  CHECK(contains(csv, "coordinate,t,y,rho1,rho2,u1,u2"));
  CHECK(contains(csv, "\ny1,"));
  CHECK(contains(csv, "\ny2,"));
}

TEST_CASE("atomic write leaves no temporary file") {
  const auto dir = std::filesystem::temp_directory_path() / "bifluid_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(write_atomic((dir / "missing" / "x.txt").string(), "x"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_config reports a missing file") {
  try {
    load_config("/nonexistent/bifluid.cfg");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}
