#pragma once

#include <iosfwd>
#include <string>

#include "bifluid/config.hpp"

namespace bifluid {

enum ExitStatus : int {
  kExitPass = 0,
  kExitMonitorFailure = 1,
  kExitInputError = 2,
  kExitSolverFailure = 3,
};

struct CommandContext {
  std::string out;     // output directory, created when missing
  bool quiet = false;  // suppresses progress lines on `log`
  std::ostream* log = nullptr;
  std::ostream* err = nullptr;
};

/// Solver run with the enabled monitors: fields.csv, energy.csv, estimates.csv.
int command_simulate(const RunConfig& config, const CommandContext& ctx);

/// Every monitor, including time-derivative norms and mass-coordinate checks.
int command_verify(const RunConfig& config, const CommandContext& ctx);

/// Manufactured-solution convergence study: mms.csv.
int command_mms(const RunConfig& config, const CommandContext& ctx);

/// Continuous-dependence scaling: uniqueness.csv.
int command_uniqueness(const RunConfig& config, const CommandContext& ctx);

/// Heat-mode oracle check and refinement cross-check: galerkin_heat.csv, galerkin.csv.
int command_galerkin(const RunConfig& config, const CommandContext& ctx);

/// Loads the config, writes resolved_config into the output directory and
/// dispatches on verb. Maps every error to its exit status.
int run_command(const std::string& verb, const std::string& config_path, const CommandContext& ctx);

/// Exit status for an error raised by the library.
int exit_status(ErrorCode code);

/// exp(-pi^2 t mu) applied to (1, 0): the single-mode heat solution.
std::array<double, 2> heat_mode_exact(const Matrix2& mu, double t);

}  // namespace bifluid
