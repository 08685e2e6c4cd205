#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bifluid/core.hpp"
#include "bifluid/diagnostics.hpp"
#include "bifluid/solver.hpp"

namespace bifluid {

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

/// A closed-form field f(x,t) with its analytic partial derivatives.
struct ClosedForm {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dxx;
};

/// Closed-form densities and velocities; the forcing that makes them exact
/// solutions is derived in manufactured_sources.
struct ManufacturedCase {
  std::string name;
  std::array<ClosedForm, 2> rho;
  std::array<ClosedForm, 2> u;
};

/// rho_i = 2 + 0.1 sin(2 pi x) cos t, u_i = sin(pi x) sin t.
ManufacturedCase canonical_case();

/// Constant density, zero velocity; needs no forcing.
ManufacturedCase equilibrium_case(double density = 1.0);

/// Residuals of the closed forms in the continuity and momentum equations.
SourceTerms manufactured_sources(const ManufacturedCase& mcase, const MixtureParams& params);

State exact_state(const ManufacturedCase& mcase, const Grid& grid, double t);

struct MmsOptions {
  double t_end = 1.0;
  double dt_factor = 0.1;  // dt = dt_factor * h (rounded so t_end is hit exactly)
  SchemeOptions scheme;
};

struct MmsRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  std::array<double, 4> errors{};  // L2 errors of rho1, rho2, u1, u2 at t_end
  double combined = 0.0;           // sqrt of the sum of squares
};

struct MmsResult {
  std::vector<MmsRow> rows;
  std::array<double, 4> order{};
  double combined_order = 0.0;
  // Smallest per-field order; NaN entries (identically zero errors) are skipped.
  double min_order = 0.0;
};

/// Least-squares slope of log(error) against log(h). NaN when any error is 0.
double fitted_order(const std::vector<double>& h, const std::vector<double>& errors);

MmsResult mms_convergence(const ManufacturedCase& mcase, const MixtureParams& params,
                          const std::vector<int>& resolutions, const MmsOptions& options = {});

// ---------------------------------------------------------------------------
// Spectral Galerkin oracle
// ---------------------------------------------------------------------------

struct GalerkinOptions {
  int collocation = 0;       // Chebyshev points minus one; 0 picks max(4*modes, 48)
  double tolerance = 1e-8;   // absolute and relative tolerance of the adaptive integrator
  int levels = 11;           // stored time levels, uniformly spaced including 0 and t_end
  int grid_cells = 0;        // Eulerian output grid; 0 uses the initial state's grid (64 for closed forms)
  bool freeze_density = false;
  long max_steps = 2000000;
};

struct GalerkinResult {
  Trajectory trajectory;                        // on the Eulerian grid
  std::vector<std::array<Field, 2>> coefficients;  // sine coefficients per stored level
};

/// Velocities expanded in sin(k pi x), k = 1..modes; densities advanced by
/// Chebyshev collocation of the continuity equation. Throws PositivityLoss
/// (with the failing time) or IntegratorFailure.
GalerkinResult galerkin_solve(const InitialData& initial, const MixtureParams& params, int modes,
                              double t_end, const GalerkinOptions& options);

/// Nodal variant: velocity coefficients from the discrete sine transform of
/// the nodal data, densities interpolated to the collocation points.
GalerkinResult galerkin_solve(const State& initial, const MixtureParams& params, int modes, double t_end,
                              const GalerkinOptions& options = {});

/// Discrete L2 distance of two states on the same grid (all four fields).
double l2_distance(const State& a, const State& b);

// ---------------------------------------------------------------------------
// Continuous dependence
// ---------------------------------------------------------------------------

/// Functionals of the difference between two trajectories sampled at the same times.
struct DifferenceFunctionals {
  std::vector<double> t;
  std::array<std::vector<double>, 2> eta1;  // int (rho_i^(1) - rho_i^(2))^2
  std::vector<double> eta2;                 // 1/2 sum int rho_i^(1) (u_i^(1) - u_i^(2))^2
  std::vector<double> eta3;                 // M0 sum int_0^t int |d_x (u_i^(1) - u_i^(2))|^2
};

DifferenceFunctionals difference_functionals(const Trajectory& first, const Trajectory& second,
                                             const MixtureParams& params);

struct GronwallCheck {
  std::vector<double> rate;   // assembled growth coefficient per level
  std::vector<double> ratio;  // (eta2 + eta3/2)(t) / ((eta2 + eta3/2)(0) exp(int_0^t rate))
  double worst_ratio = 0.0;
  EstimateEntry entry;
};

/// Integral form of the Gronwall inequality for eta2 + eta3/2. The growth
/// coefficient is assembled from the trajectory norms the uniqueness argument
/// uses. Requires identical initial densities and at least 3 levels.
GronwallCheck gronwall_bound_check(const DifferenceFunctionals& funcs, const Trajectory& first,
                                   const Trajectory& second, const MixtureParams& params,
                                   double tol_scale = 5.0);

struct UniquenessRow {
  double eps = 0.0;
  double sup_total = 0.0;  // sup_t (eta11 + eta12 + 2 eta2 + eta3)
  double sup_ratio = 0.0;  // sup_total / eps^2 (sup_total itself when eps == 0)
  std::array<double, 2> eta1_initial{};
  std::array<double, 2> eta1_sup{};
  double eta2_sup = 0.0;
  double eta3_final = 0.0;
  double gronwall_ratio = 0.0;  // NaN when initial densities differ
  bool gronwall_pass = false;
};

struct UniquenessResult {
  std::vector<UniquenessRow> rows;
  double spread = 0.0;  // max/min of sup_ratio over eps > 0
  double h = 0.0;
  double dt = 0.0;
};

/// Runs base and base + eps * delta with a common fixed time step (taken
/// from the base state unless ctl.fixed_dt is set).
UniquenessResult uniqueness_experiment(const InitialData& base, const InitialData& delta,
                                       const std::vector<double>& eps_list, const MixtureParams& params,
                                       const StepControl& ctl, const Grid& grid,
                                       double gronwall_tol_scale = 5.0);

InitialData perturbed(const InitialData& base, const InitialData& delta, double eps);

}  // namespace bifluid
