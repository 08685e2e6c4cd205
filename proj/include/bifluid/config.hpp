#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bifluid/core.hpp"
#include "bifluid/solver.hpp"

namespace bifluid {

/// Initial data as expression strings over x. A preset fills all four; keys
/// given explicitly override the preset's entries.
struct InitialSpec {
  std::string preset;  // empty when every profile is given explicitly
  std::array<std::string, 2> rho0;
  std::array<std::string, 2> u0;

  bool operator==(const InitialSpec&) const = default;
};

struct MonitorToggles {
  bool energy = true;
  bool velocity = true;
  bool density = true;
  bool definition1 = false;  // time-derivative norms; stores every step
  bool lagrangian = false;
  double tol_scale = 2.0;
  double lagrangian_constant = 2.0;  // transformed-energy residual <= C h^2

  bool operator==(const MonitorToggles&) const = default;
};

struct MmsBlock {
  std::vector<int> resolutions{64, 128, 256};
  double dt_factor = 0.1;
  double min_order = 0.9;

  bool operator==(const MmsBlock&) const = default;
};

struct UniquenessBlock {
  std::vector<double> eps{0.0, 1e-2, 1e-3, 1e-4};
  double max_spread = 2.0;
  double gronwall_scale = 5.0;
  // Perturbation direction; "random" draws a smooth velocity perturbation from the seed.
  std::string delta = "expression";
  std::array<std::string, 2> delta_rho0{"0", "0"};
  std::array<std::string, 2> delta_u0{"sin(pi*x)", "0"};

  bool operator==(const UniquenessBlock&) const = default;
};

struct GalerkinBlock {
  std::vector<int> modes{4, 8, 16};
  std::vector<int> cells{32, 64, 128};
  double horizon = 0.1;
  double heat_tol = 1e-6;
  double ode_tol = 1e-8;

  bool operator==(const GalerkinBlock&) const = default;
};

struct RunConfig {
  MixtureParams params;  // validated: M0 filled in
  int n = 64;
  StepControl control;    // control.stride is unused; see `stride`
  InitialSpec initial;
  MonitorToggles monitors;
  std::optional<int> stride;  // empty: automatic, at most 1000 stored levels
  std::uint64_t seed = 0;
  std::string directory;  // output directory; --out on the command line takes precedence
  MmsBlock mms;
  UniquenessBlock uniqueness;
  GalerkinBlock galerkin;

  bool operator==(const RunConfig&) const = default;
};

/// Names of the built-in initial-data presets.
std::vector<std::string> preset_names();

/// Expression strings of a preset; throws ValidationError for unknown names.
InitialSpec preset(const std::string& name);

/// Parses key-value text. Section headers `[name]` are optional; each key
/// belongs to exactly one section and may not appear under another.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& config);

/// Compiles the expression strings and checks finiteness on [0,1].
InitialData build_initial(const InitialSpec& spec);
InitialData build_perturbation(const UniquenessBlock& block, std::uint64_t seed);

}  // namespace bifluid
