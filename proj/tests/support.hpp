#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bifluid/core.hpp"
#include "bifluid/solver.hpp"

namespace testing {

using std::numbers::pi;

inline bifluid::InitialData constant_data(double rho, double u = 0.0) {
  bifluid::InitialData d;
  d.rho0 = {[rho](double) { return rho; }, [rho](double) { return rho; }};
  d.u0 = {[u](double) { return u; }, [u](double) { return u; }};
  return d;
}

inline bifluid::InitialData smooth_data() {
  bifluid::InitialData d;
  d.rho0 = {[](double x) { return 1.0 + 0.5 * std::sin(2 * pi * x); },
            [](double x) { return 1.0 + 0.25 * std::cos(pi * x); }};
  d.u0 = {[](double x) { return 0.5 * std::sin(pi * x); }, [](double x) { return -0.3 * std::sin(2 * pi * x); }};
  return d;
}

inline bifluid::InitialData acoustic_data() {
  bifluid::InitialData d = constant_data(1.0);
  d.u0[0] = [](double x) { return 0.01 * std::sin(pi * x); };
  return d;
}

inline bifluid::InitialData counterflow_data() {
  bifluid::InitialData d = constant_data(1.0);
  d.u0[0] = [](double x) { return std::sin(pi * x); };
  d.u0[1] = [](double x) { return -std::sin(pi * x); };
  return d;
}

inline bifluid::MixtureParams default_params() { return bifluid::validate_params(bifluid::MixtureParams{}); }

/// Lower-triangular viscosity with a nonzero cross term.
inline bifluid::MixtureParams triangular_params() {
  bifluid::MixtureParams p;
  p.mu = {{{1.0, 0.0}, {0.5, 1.0}}};
  return bifluid::validate_params(p);
}

/// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  /// Positive density: a few random Fourier modes around a positive mean.
  bifluid::Field density(const bifluid::Grid& g, double mean = 1.0, double amplitude = 0.4) {
    double c[3], s[3];
    for (int k = 0; k < 3; ++k) {
      c[k] = uniform(-1, 1);
      s[k] = uniform(-1, 1);
    }
    double norm = 0.0;
    for (int k = 0; k < 3; ++k) norm += std::abs(c[k]) + std::abs(s[k]);
    bifluid::Field f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += c[k] * std::cos(2 * pi * (k + 1) * g.nodes[j]) + s[k] * std::sin(2 * pi * (k + 1) * g.nodes[j]);
      f[j] = mean + amplitude * mean * v / norm;
    }
    return f;
  }

  /// Velocity vanishing at both ends: random sine series.
  bifluid::Field velocity(const bifluid::Grid& g, double amplitude = 0.5) {
    double c[4];
    for (int k = 0; k < 4; ++k) c[k] = uniform(-1, 1) / (k + 1);
    bifluid::Field f(g.size(), 0.0);
    for (std::size_t j = 1; j + 1 < g.size(); ++j) {
      for (int k = 0; k < 4; ++k) f[j] += amplitude * c[k] * std::sin(pi * (k + 1) * g.nodes[j]);
    }
    return f;
  }

  bifluid::State state(const bifluid::Grid& g) {
    bifluid::State s;
    for (int i = 0; i < 2; ++i) {
      s.rho[i] = density(g, uniform(0.5, 2.0));
      s.u[i] = velocity(g);
    }
    return s;
  }

  /// Coercive 2x2 matrix, optionally lower triangular.
  bifluid::Matrix2 viscosity(bool triangular) {
    while (true) {
      bifluid::Matrix2 m{{{uniform(0.2, 3.0), triangular ? 0.0 : uniform(-1, 1)}, {uniform(-1, 1), uniform(0.2, 3.0)}}};
      const double p = m[0][0], r = m[1][1], q = 0.5 * (m[0][1] + m[1][0]);
      if (0.5 * (p + r) - std::hypot(0.5 * (p - r), q) > 0.05) return m;
    }
  }

  bifluid::MixtureParams params(bool triangular = true) {
    bifluid::MixtureParams p;
    p.a = uniform(0.1, 5.0);
    p.K = {uniform(0.2, 3.0), uniform(0.2, 3.0)};
    p.gamma = {uniform(1.1, 3.0), uniform(1.1, 3.0)};
    p.mu = viscosity(triangular);
    return bifluid::validate_params(p);
  }

 private:
  std::mt19937_64 engine_;
};

inline double max_abs_diff(const bifluid::Field& a, const bifluid::Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double state_distance(const bifluid::State& a, const bifluid::State& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i) m = std::max({m, max_abs_diff(a.rho[i], b.rho[i]), max_abs_diff(a.u[i], b.u[i])});
  return m;
}

}  // namespace testing
