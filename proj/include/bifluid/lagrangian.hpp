#pragma once

#include <vector>

#include "bifluid/core.hpp"
#include "bifluid/diagnostics.hpp"

namespace bifluid {

/// Mass coordinate y_m(x) = int_0^x rho_m ds of one component at one time level.
///
/// The forward map is the exact antiderivative of the piecewise-linear
/// density, so it is quadratic inside each cell and its nodal values equal
/// the cumulative trapezoidal sums. The inverse solves that quadratic.
struct MassChart {
  int m = 0;  // component index, 0 or 1
  double d_m = 0.0;
  double h = 0.0;
  Field rho;      // density at the Eulerian nodes
  Field y_nodes;  // y_m at the Eulerian nodes

  double y_of(double x) const;
  double x_of(double y) const;
};

enum class Interpolation { Linear, MonotoneCubic };

MassChart build_chart(const State& state, int m);

/// Uniform points y_j = j * d_m / n_y, j = 0..n_y.
Field mass_grid(const MassChart& chart, int n_y);

/// Field (given at Eulerian nodes) evaluated at x(y_j) on the uniform mass grid.
Field resample(std::span<const double> field, const MassChart& chart, int n_y,
               Interpolation method = Interpolation::Linear);

/// Interpolates nodal values on the uniform grid of spacing h at position x.
double interpolate(std::span<const double> field, double h, double x,
                   Interpolation method = Interpolation::Linear);

/// |E_eulerian - E_mass| for the energy written in the mass coordinate of
/// component m; a pure change-of-variables identity, zero up to quadrature.
double verify_transformed_energy(const State& state, const MixtureParams& params, int m,
                                 int n_y = 0, Interpolation method = Interpolation::Linear);

struct MeanValuePoint {
  double x = 0.0;
  double y = 0.0;         // mass coordinate of x
  double rho = 0.0;       // interpolated density at x
  double d_m = 0.0;
  double node_gap = 0.0;  // max |rho[k+1] - rho[k]|
  bool bracketed = false; // false when falling back to the closest node
};

/// Point where rho_m equals the total mass d_m (linear interpolation
/// inside the first bracketing cell; first closest node otherwise).
MeanValuePoint mean_value_point(const State& state, int m);

struct TransformedResidual {
  double nonconservative = 0.0;  // d_t rho_i + rho_m (u_i - u_m) d_y rho_i + rho_i rho_m d_y u_i
  double divergence = 0.0;       // d_t (rho_i/rho_m) + d_y (rho_i (u_i - u_m))
};

/// Max-norm residuals of the continuity equation in the mass coordinate of
/// component m, over interior mass-grid points, from two consecutive states.
TransformedResidual transformed_residual(const State& before, const State& after, int m, int i,
                                         int n_y = 0);

struct LagrangianRow {
  double t = 0.0;
  int m = 0;
  double energy_residual = 0.0;
  MeanValuePoint point;
};

struct LagrangianSummary {
  std::vector<LagrangianRow> rows;
  std::vector<EstimateEntry> entries;
};

/// Transformed-energy residual against constant * h^2 and the mean-value
/// point check |rho_m(x) - d_m| <= node gap, over every state and both charts.
LagrangianSummary lagrangian_report(const std::vector<State>& states, const MixtureParams& params,
                                    double constant);

}  // namespace bifluid
