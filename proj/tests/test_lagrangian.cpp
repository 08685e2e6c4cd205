#include <doctest.h>

#include "bifluid/lagrangian.hpp"
#include "support.hpp"

using namespace bifluid;
using testing::pi;

namespace {

State state_with_density(const Grid& g, const Profile& rho) {
  InitialData d = testing::constant_data(1.0);
  d.rho0[0] = rho;
  return sample_initial(d, g);
}

}  // namespace

TEST_CASE("mass chart of a constant density is linear") {
  const State s = sample_initial(testing::constant_data(2.0), Grid::uniform(10));
  const MassChart c = build_chart(s, 0);
  CHECK(c.d_m == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c.y_of(0.3) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.x_of(0.6) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(c.x_of(-1.0) == 0.0);
  CHECK(c.x_of(5.0) == 1.0);
  CHECK_THROWS_AS(build_chart(s, 2), Error);
}

TEST_CASE("mass chart of a linear density is the exact antiderivative") {
  const Grid g = Grid::uniform(4);
  const State s = state_with_density(g, [](double x) { return 1.0 + x; });
  const MassChart c = build_chart(s, 0);
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) CHECK(c.y_of(x) == doctest::Approx(x + 0.5 * x * x).epsilon(1e-14));
  CHECK(c.d_m == doctest::Approx(1.5).epsilon(1e-15));
  // y = x + x^2/2 inverts to x = sqrt(1 + 2y) - 1.
  for (double y : {0.05, 0.4, 1.2}) CHECK(c.x_of(y) == doctest::Approx(std::sqrt(1 + 2 * y) - 1).epsilon(1e-13));
}

TEST_CASE("chart nodes are cumulative trapezoid sums") {
  const Grid g = Grid::uniform(16);
  const State s = sample_initial(testing::smooth_data(), g);
  const MassChart c = build_chart(s, 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(c.y_of(g.nodes[k]) == doctest::Approx(c.y_nodes[k]).epsilon(1e-14));
    const std::span<const double> head(s.rho[1].data(), k + 1);
    CHECK(c.y_nodes[k] == doctest::Approx(k == 0 ? 0.0 : trapezoid(head, g.h)).epsilon(1e-14));
  }
  CHECK(c.d_m == doctest::Approx(total_mass(s.rho[1], g.h)).epsilon(1e-15));
}

TEST_CASE("mass grid spans the total mass") {
  const State s = sample_initial(testing::constant_data(3.0), Grid::uniform(8));
  const Field y = mass_grid(build_chart(s, 0), 6);
  CHECK(y.size() == 7);
  CHECK(y.front() == 0.0);
  CHECK(y.back() == build_chart(s, 0).d_m);
  CHECK(y[2] == doctest::Approx(1.0));
}

TEST_CASE("interpolation") {
  const Field f{0.0, 1.0, 4.0, 9.0};
  const double h = 1.0 / 3.0;
  CHECK(interpolate(f, h, 0.5) == doctest::Approx(2.5));
  CHECK(interpolate(f, h, 1.0) == 9.0);
  CHECK(interpolate(f, h, 0.0) == 0.0);
  const double cubic = interpolate(f, h, 0.5, Interpolation::MonotoneCubic);
  CHECK(cubic > 1.0);
  CHECK(cubic < 4.0);
}

TEST_CASE("resampling a constant field stays constant") {
  const Grid g = Grid::uniform(32);
  const State s = sample_initial(testing::smooth_data(), g);
  const MassChart c = build_chart(s, 0);
  const Field ones(g.size(), 1.0);
  for (double v : resample(ones, c, 50)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : resample(ones, c, 50, Interpolation::MonotoneCubic)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(resample(ones, c, 0), Error);
}

TEST_CASE("transformed energy is exact at equilibrium") {
  const State s = sample_initial(testing::constant_data(1.7), Grid::uniform(24));
  for (int m = 0; m < 2; ++m) CHECK(verify_transformed_energy(s, testing::default_params(), m) <= 1e-13);
}

TEST_CASE("transformed energy residual decays like h^2") {
  const MixtureParams p = testing::default_params();
  std::vector<double> r;
  for (int n : {32, 64, 128}) r.push_back(verify_transformed_energy(sample_initial(testing::smooth_data(), Grid::uniform(n)), p, 0));
  CHECK(r[0] / r[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(r[1] / r[2] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(r[2] <= 2.0 / (128.0 * 128.0));
}

TEST_CASE("mean value point of a smooth density") {
  const Grid g = Grid::uniform(64);
  const State s = state_with_density(g, [](double x) { return 1.0 + 0.5 * std::sin(2 * pi * x); });
  const MeanValuePoint p = mean_value_point(s, 0);
  CHECK(p.bracketed);
  CHECK(std::abs(p.rho - p.d_m) <= p.node_gap);
  CHECK(p.y == doctest::Approx(build_chart(s, 0).y_of(p.x)));
}

TEST_CASE("mean value point of a linear density is its midpoint") {
  const Grid g = Grid::uniform(10);
  const State s = state_with_density(g, [](double x) { return 1.0 + x; });
  const MeanValuePoint p = mean_value_point(s, 0);
  CHECK(p.d_m == doctest::Approx(1.5));
  CHECK(p.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.rho == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p.node_gap == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("transformed continuity residuals shrink with the time step") {
  const Grid g = Grid::uniform(64);
  const MixtureParams p = testing::default_params();
  const State s = sample_initial(testing::smooth_data(), g);
  const State coarse = step(s, p, 4e-3);
  const State fine = step(s, p, 1e-3);
  for (int i = 0; i < 2; ++i) {
    const TransformedResidual rc = transformed_residual(s, coarse, 0, i);
    const TransformedResidual rf = transformed_residual(s, fine, 0, i);
    CHECK(std::isfinite(rc.nonconservative));
    CHECK(rf.divergence <= rc.divergence * 1.5 + 1e-12);
  }
  // Component m in its own chart: rho_m / rho_m == 1, so only the flux term remains.
  CHECK(transformed_residual(s, fine, 0, 0).divergence <= 1e-12);
  CHECK_THROWS_AS(transformed_residual(fine, s, 0, 0), Error);
}

TEST_CASE("lagrangian report on a smooth trajectory") {
  const Grid g = Grid::uniform(64);
  StepControl ctl;
  ctl.t_end = 0.2;
  ctl.stride = 5;
  const MixtureParams p = testing::default_params();
  const Trajectory traj = run(sample_initial(testing::smooth_data(), g), p, ctl, g);
  const LagrangianSummary sum = lagrangian_report(traj.states, p, 2.0);
  CHECK(sum.rows.size() == 2 * traj.states.size());
  REQUIRE(sum.entries.size() == 4);
  CHECK(sum.entries[0].name == "transformed_energy_y1");
  CHECK(sum.entries[1].name == "mean_value_point_y1");
  for (const auto& e : sum.entries) CHECK(e.pass);
  CHECK(lagrangian_report({}, p, 2.0).entries.empty());
}

TEST_CASE("lagrangian report at equilibrium") {
  const State s = sample_initial(testing::constant_data(1.0), Grid::uniform(16));
  const LagrangianSummary sum = lagrangian_report({s, s}, testing::default_params(), 2.0);
  for (const auto& e : sum.entries) CHECK(e.pass);
}

TEST_CASE("property: x_of inverts y_of") {
  testing::Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = Grid::uniform(gen.integer(4, 100));
    State s = gen.state(g);
    const MassChart c = build_chart(s, trial % 2);
    for (int k = 0; k < 20; ++k) {
      const double x = gen.uniform(0, 1);
      CHECK(c.x_of(c.y_of(x)) == doctest::Approx(x).epsilon(1e-11));
      const double y = gen.uniform(0, c.d_m);
      CHECK(c.y_of(c.x_of(y)) == doctest::Approx(y).epsilon(1e-11));
    }
  }
}

TEST_CASE("property: mass coordinate is strictly increasing") {
  testing::Gen gen(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = Grid::uniform(gen.integer(4, 100));
    const MassChart c = build_chart(gen.state(g), 0);
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double y = c.y_of(k / 200.0);
      CHECK(y > prev);
      prev = y;
    }
  }
}

TEST_CASE("property: mean value point lies within one node gap") {
  testing::Gen gen(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g = Grid::uniform(gen.integer(4, 100));
    const State s = gen.state(g);
    for (int m = 0; m < 2; ++m) {
      const MeanValuePoint p = mean_value_point(s, m);
      CHECK(std::abs(p.rho - p.d_m) <= p.node_gap + 1e-12);
      CHECK(p.x >= 0.0);
      CHECK(p.x <= 1.0);
    }
  }
}

TEST_CASE("property: monotone cubic preserves monotone data") {
  testing::Gen gen(44);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(3, 30);
    Field f(n + 1);
    f[0] = gen.uniform(-1, 1);
    for (int k = 1; k <= n; ++k) f[k] = f[k - 1] + gen.uniform(0, 1) * gen.uniform(0, 1);
    double prev = -1e300;
    for (int k = 0; k <= 500; ++k) {
      const double v = interpolate(f, 1.0 / n, k / 500.0, Interpolation::MonotoneCubic);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}
