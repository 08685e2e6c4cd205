#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bifluid/error.hpp"

namespace bifluid {

using Field = std::vector<double>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Densities below this are treated as vacuum unless a caller overrides it.
inline constexpr double kDefaultDensityFloor = 1e-12;

/// Physical constants of the two-component mixture. Index 0 is component 1.
///
/// `mu[i][j]` multiplies the second derivative of velocity j in momentum
/// equation i. `M0` and `non_triangular` are outputs of validate_params.
struct MixtureParams {
  double a = 1.0;
  std::array<double, 2> K{1.0, 1.0};
  std::array<double, 2> gamma{2.0, 2.0};
  Matrix2 mu{{{1.0, 0.0}, {0.0, 1.0}}};

  // Reject (rather than warn about) a nonzero mu12 when set.
  bool triangular_enforced = false;

  double M0 = 0.0;
  bool non_triangular = false;

  bool operator==(const MixtureParams&) const = default;
};

struct Grid {
  int n = 0;
  double h = 0.0;
  std::vector<double> nodes;

  static Grid uniform(int cells);
  std::size_t size() const { return nodes.size(); }
};

struct State {
  double t = 0.0;
  std::array<Field, 2> rho;
  std::array<Field, 2> u;

  std::size_t size() const { return rho[0].size(); }
  int cells() const { return static_cast<int>(size()) - 1; }
  double spacing() const { return 1.0 / cells(); }

  bool operator==(const State&) const = default;
};

using Profile = std::function<double(double)>;

/// Closed-form initial profiles on [0,1], sampled to nodes by sample_initial.
struct InitialData {
  std::array<Profile, 2> rho0;
  std::array<Profile, 2> u0;
};

/// Piecewise-linear interpolant through tabulated (x, value) pairs; x must
/// be strictly increasing and cover the evaluation range.
Profile tabulated(std::vector<double> x, std::vector<double> values);

/// Smallest eigenvalue of (mu + mu^T)/2. Throws NotPositiveDefinite when the
/// result is not strictly positive.
double compute_M0(const Matrix2& mu);

/// Checks a > 0, K_i > 0, gamma_i > 1 and coercivity; fills M0 and the
/// non-triangular warning flag.
MixtureParams validate_params(const MixtureParams& params);

State sample_initial(const InitialData& data, const Grid& grid,
                     double density_floor = kDefaultDensityFloor);

/// Throws unless every density exceeds the floor and boundary velocities vanish.
void check_state(const State& state, double density_floor = kDefaultDensityFloor);

/// Composite trapezoidal rule on a uniform grid of spacing h.
double trapezoid(std::span<const double> f, double h);

/// Mass of density field on the uniform grid (trapezoidal weights).
inline double total_mass(std::span<const double> rho, double h) {
  return trapezoid(rho, h);
}

}  // namespace bifluid
