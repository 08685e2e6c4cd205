#include <doctest.h>

#include <limits>

#include "bifluid/core.hpp"
#include "support.hpp"

using namespace bifluid;

namespace {

ErrorCode code_of(const MixtureParams& p) {
  try {
    validate_params(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected validation to fail");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const MixtureParams& p) {
  try {
    validate_params(p);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("M0 of standard matrices") {
  CHECK(compute_M0({{{1, 0}, {0, 1}}}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_M0({{{2, 0}, {0, 3}}}) == doctest::Approx(2.0).epsilon(1e-15));
  // Symmetric part [[2, 0.5], [0.5, 2]] has eigenvalues 1.5 and 2.5.
  CHECK(compute_M0({{{2, 0}, {1, 2}}}) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("M0 rejects matrices that are not coercive") {
  CHECK_THROWS_AS(compute_M0({{{1, 0}, {0, 0}}}), Error);
  try {
    compute_M0({{{1, 3}, {3, 1}}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  try {
    compute_M0({{{1, std::numeric_limits<double>::quiet_NaN()}, {0, 1}}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteInput);
  }
}

TEST_CASE("validate_params accepts a triangular matrix and caches M0") {
  MixtureParams p;
  p.mu = {{{1, 0}, {0.5, 1}}};
  const MixtureParams v = validate_params(p);
  CHECK(v.M0 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK_FALSE(v.non_triangular);
}

TEST_CASE("validate_params flags or rejects a nonzero mu12") {
  MixtureParams p;
  p.mu = {{{1, 0.2}, {0, 1}}};
  CHECK(validate_params(p).non_triangular);
  p.triangular_enforced = true;
  CHECK(code_of(p) == ErrorCode::ValidationError);
}

TEST_CASE("validate_params error codes are distinct") {
  MixtureParams drag;
  drag.a = 0.0;
  MixtureParams pressure;
  pressure.K[1] = -1.0;
  MixtureParams exponent;
  exponent.gamma[0] = 1.0;
  MixtureParams coercive;
  coercive.mu = {{{1, 0}, {0, -1}}};

  CHECK(code_of(drag) == ErrorCode::DragNotPositive);
  CHECK(code_of(pressure) == ErrorCode::PressureCoefficientNotPositive);
  CHECK(code_of(exponent) == ErrorCode::AdiabaticExponentTooSmall);
  CHECK(code_of(coercive) == ErrorCode::NotPositiveDefinite);
  CHECK(message_of(drag) == "drag must be positive");
  CHECK(message_of(exponent) == "adiabatic exponent must exceed 1");
}

TEST_CASE("grid layout") {
  const Grid g = Grid::uniform(10);
  CHECK(g.size() == 11);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.nodes.back() == 1.0);
  CHECK(g.h * g.n == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.nodes[k] > g.nodes[k - 1]);
  CHECK_THROWS_AS(Grid::uniform(3), Error);
}

TEST_CASE("sample_initial on constant data") {
  const State s = sample_initial(testing::constant_data(1.0), Grid::uniform(8));
  CHECK(s.t == 0.0);
  CHECK(s.size() == 9);
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      CHECK(s.rho[i][k] == 1.0);
      CHECK(s.u[i][k] == 0.0);
    }
  }
}

TEST_CASE("sample_initial zeroes endpoint velocities exactly") {
  InitialData d = testing::constant_data(1.0);
  d.u0[0] = [](double x) { return std::sin(testing::pi * x); };
  d.u0[1] = [](double x) { return 1.0 + x; };  // nonzero at both ends before sampling
  const State s = sample_initial(d, Grid::uniform(16));
  for (int i = 0; i < 2; ++i) {
    CHECK(s.u[i].front() == 0.0);
    CHECK(s.u[i].back() == 0.0);
  }
  CHECK(s.u[0][8] == doctest::Approx(1.0));
}

TEST_CASE("sample_initial evaluates at the nodes") {
  InitialData d = testing::constant_data(1.0);
  d.rho0[0] = [](double x) { return 1.0 + x; };
  const State s = sample_initial(d, Grid::uniform(8));
  for (int k = 0; k <= 8; ++k) CHECK(s.rho[0][k] == doctest::Approx(1.0 + k / 8.0).epsilon(1e-15));
  CHECK(s.rho[0].back() == 2.0);
}

TEST_CASE("sample_initial rejects non-positive and non-finite data") {
  InitialData d = testing::constant_data(1.0);
  d.rho0[1] = [](double x) { return x - 0.5; };
  try {
    sample_initial(d, Grid::uniform(8));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveDensity);
  }
  d = testing::constant_data(1.0);
  d.u0[0] = [](double x) { return 1.0 / (x - 0.5); };
  CHECK_THROWS_AS(sample_initial(d, Grid::uniform(8)), Error);
}

TEST_CASE("density floor is configurable") {
  const InitialData d = testing::constant_data(1e-6);
  CHECK_NOTHROW(sample_initial(d, Grid::uniform(8)));
  CHECK_THROWS_AS(sample_initial(d, Grid::uniform(8), 1e-3), Error);
}

TEST_CASE("tabulated profile interpolates linearly") {
  const Profile p = tabulated({0.0, 0.5, 1.0}, {1.0, 3.0, 2.0});
  CHECK(p(0.0) == 1.0);
  CHECK(p(0.25) == doctest::Approx(2.0));
  CHECK(p(0.75) == doctest::Approx(2.5));
  CHECK(p(1.0) == 2.0);
}

TEST_CASE("trapezoid integrates linear functions exactly") {
  const Grid g = Grid::uniform(7);
  Field f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) f[k] = 2.0 + 3.0 * g.nodes[k];
  CHECK(trapezoid(f, g.h) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("property: M0 is invariant under transposition") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix2 mu = gen.viscosity(false);
    const Matrix2 t{{{mu[0][0], mu[1][0]}, {mu[0][1], mu[1][1]}}};
    CHECK(compute_M0(mu) == compute_M0(t));
  }
}

TEST_CASE("property: quadratic form is bounded below by M0") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix2 mu = gen.viscosity(false);
    const double M0 = compute_M0(mu);
    for (int k = 0; k < 20; ++k) {
      const double x = gen.uniform(-1, 1), y = gen.uniform(-1, 1);
      const double form = x * (mu[0][0] * x + mu[0][1] * y) + y * (mu[1][0] * x + mu[1][1] * y);
      CHECK(form >= M0 * (x * x + y * y) - 1e-12);
    }
  }
}

TEST_CASE("property: M0 is attained by some direction") {
  testing::Gen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix2 mu = gen.viscosity(false);
    const double M0 = compute_M0(mu);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20000; ++k) {
      const double th = testing::pi * k / 20000.0;
      const double x = std::cos(th), y = std::sin(th);
      best = std::min(best, x * (mu[0][0] * x + mu[0][1] * y) + y * (mu[1][0] * x + mu[1][1] * y));
    }
    CHECK(best == doctest::Approx(M0).epsilon(1e-6));
  }
}

TEST_CASE("property: validate_params is idempotent") {
  testing::Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const MixtureParams once = gen.params(trial % 2 == 0);
    CHECK(validate_params(once) == once);
  }
}

TEST_CASE("property: sampled endpoint velocities are exactly zero") {
  testing::Gen gen(15);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = gen.uniform(-5, 5), b = gen.uniform(-5, 5), c = gen.uniform(0, 10);
    InitialData d = testing::constant_data(1.0);
    d.u0[0] = [=](double x) { return a + b * x + std::cos(c * x); };
    d.u0[1] = [=](double x) { return b - a * x * x; };
    const State s = sample_initial(d, Grid::uniform(gen.integer(4, 64)));
    for (int i = 0; i < 2; ++i) {
      CHECK(s.u[i].front() == 0.0);
      CHECK(s.u[i].back() == 0.0);
    }
  }
}
