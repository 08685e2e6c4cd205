#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bifluid/core.hpp"

namespace bifluid {

enum class Convection {
  Upwind,   // first-order donor cell, positivity preserving
  Central,  // second-order, test mode only
};

enum class ViscousSolve {
  Automatic,   // sequential when mu12 == 0, coupled block solve otherwise
  Sequential,  // u1 first, then u2 with mu21 * u1_xx as a known source
  Block,       // 2x2-block tridiagonal solve of both components at once
};

/// Volumetric forcing added to the continuity (i) and momentum (i) equations.
/// Used by manufactured-solution runs; absent in physical runs.
struct SourceTerms {
  std::function<double(int component, double x, double t)> continuity;
  std::function<double(int component, double x, double t)> momentum;
};

struct SchemeOptions {
  Convection convection = Convection::Upwind;
  ViscousSolve viscous = ViscousSolve::Automatic;
  bool drag_implicit = true;
  double density_floor = kDefaultDensityFloor;
  std::shared_ptr<const SourceTerms> sources;

  bool operator==(const SchemeOptions&) const = default;
};

struct StepControl {
  double cfl_safety = 0.4;
  double dt_max = 1e-2;
  double t_end = 1.0;
  // Nonzero forces a constant step (last step shortened to hit t_end).
  double fixed_dt = 0.0;
  // Keep every stride-th state; the final state is always kept.
  int stride = 1;
  SchemeOptions scheme;

  bool operator==(const StepControl&) const = default;
};

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double cfl = 0.0;
  // Max-norm residual of the implicit velocity systems after the solve.
  double residual = 0.0;
};

struct Trajectory {
  std::vector<State> states;
  std::vector<StepRecord> step_log;
};

/// Monitors see the initial state (with step == 0, dt == 0) and every new state.
using Monitor = std::function<void(const State&, const StepRecord&)>;

/// Advances one step of size dt. Throws VacuumDegenerate when a density drops
/// to the floor and SingularSystem when an implicit system cannot be solved.
State step(const State& state, const MixtureParams& params, double dt,
           const SchemeOptions& options = {}, StepRecord* record = nullptr);

double stable_dt(const State& state, const MixtureParams& params,
                 const StepControl& ctl, const Grid& grid);

Trajectory run(const State& initial, const MixtureParams& params,
               const StepControl& ctl, const Grid& grid,
               const std::vector<Monitor>& monitors = {});

namespace detail {

// Discrete momentum system at interior nodes 1..n-1 for both components.
// Row `i` at interior node k reads
//   lower[i][j][k] u_j[k-1] + diag[i][j][k] u_j[k] + upper[i][j][k] u_j[k+1] = rhs[i][k]
// where j runs over both components; boundary values are zero.
struct CoupledSystem {
  std::array<std::array<Field, 2>, 2> lower, diag, upper;
  std::array<Field, 2> rhs;
  // Updated densities the system was assembled with.
  std::array<Field, 2> rho;
};

/// Continuity update plus assembly of the implicit velocity system. With
/// `ViscousSolve::Sequential` semantics the component-2 drag couples to the
/// new u1, so the system is lower block-triangular when mu12 == 0.
CoupledSystem assemble(const State& state, const MixtureParams& params, double dt,
                       const SchemeOptions& options);

/// Thomas elimination; returns interior unknowns. Throws SingularSystem.
Field solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                        std::span<const double> upper, std::span<const double> rhs);

/// Block Thomas elimination with 2x2 blocks; returns interior unknowns of both components.
std::array<Field, 2> solve_block_tridiagonal(const CoupledSystem& system);

/// Sequential solve exploiting mu12 == 0.
std::array<Field, 2> solve_sequential(const CoupledSystem& system);

double system_residual(const CoupledSystem& system, const std::array<Field, 2>& interior);

}  // namespace detail

}  // namespace bifluid
