#include "bifluid/commands.hpp"

#include <climits>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <ostream>

#include "bifluid/diagnostics.hpp"
#include "bifluid/io.hpp"
#include "bifluid/lagrangian.hpp"
#include "bifluid/verification.hpp"

namespace bifluid {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxStoredLevels = 1000;

std::ostream& log_stream(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::cout; }
std::ostream& err_stream(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

void progress(const CommandContext& ctx, const std::string& line) {
  if (!ctx.quiet) log_stream(ctx) << line << '\n';
}

void write_output(const CommandContext& ctx, const std::string& name, const std::string& content) {
  write_atomic((fs::path(ctx.out) / name).string(), content);
}

// Keeps every stride-th level. Without a fixed stride the stride doubles
// whenever more than kMaxStoredLevels - 1 levels are held, leaving room
// for the final state.
class LevelStore {
 public:
  explicit LevelStore(std::optional<int> stride) : fixed_(stride.has_value()), stride_(stride.value_or(1)) {}

  void offer(long step, const State& state) {
    if (step % stride_ != 0) return;
    kept_.emplace_back(step, state);
    if (!fixed_ && kept_.size() > kMaxStoredLevels - 1) {
      stride_ *= 2;
      std::erase_if(kept_, [this](const auto& entry) { return entry.first % stride_ != 0; });
    }
  }

  std::vector<State> finish(long last_step, const State& last) const {
    std::vector<State> out;
    out.reserve(kept_.size() + 1);
    for (const auto& [step, state] : kept_) out.push_back(state);
    if (kept_.empty() || kept_.back().first != last_step) out.push_back(last);
    return out;
  }

 private:
  bool fixed_;
  long stride_;
  std::vector<std::pair<long, State>> kept_;
};

bool solver_error(ErrorCode code) {
  return exit_status(code) == kExitSolverFailure;
}

std::string summary_line(const std::string& verb, const EstimateReport& report) {
  std::vector<std::string> failed;
  for (const auto& e : report.entries) {
    if (!e.pass) failed.push_back(e.name);
  }
  if (failed.empty()) return verb + ": PASS (" + std::to_string(report.entries.size()) + " checks)";
  std::string names;
  for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
  return verb + ": FAIL (" + std::to_string(failed.size()) + " of " + std::to_string(report.entries.size()) +
         " checks failed: " + names + ")";
}

int finish(const std::string& verb, const EstimateReport& report, const CommandContext& ctx) {
  for (const auto& e : report.entries) {
    if (e.pass) continue;
    err_stream(ctx) << verb << ": monitor " << e.name << " failed: observed " << format_double(e.observed);
    if (e.bound) err_stream(ctx) << ", bound " << format_double(*e.bound);
    err_stream(ctx) << '\n';
  }
  const std::string line = summary_line(verb, report);
  write_output(ctx, "summary.txt", line + "\n");
  log_stream(ctx) << line << '\n';
  return report.all_pass() ? kExitPass : kExitMonitorFailure;
}

EstimateEntry check(std::string name, double observed, std::optional<double> bound, bool pass,
                    std::string note = {}) {
  EstimateEntry e;
  e.name = std::move(name);
  e.observed = observed;
  e.bound = bound;
  if (bound) e.slack = *bound - observed;
  e.pass = pass;
  e.note = std::move(note);
  return e;
}

bool wanted(const std::string& name, const MonitorToggles& m) {
  if (name.rfind("energy", 0) == 0) return m.energy;
  if (name.rfind("velocity", 0) == 0) return m.velocity;
  if (name.rfind("rho", 0) == 0 || name.rfind("mass", 0) == 0) return m.density;
  return true;
}

Monitor progress_monitor(const CommandContext& ctx, const std::string& verb, double t_end) {
  auto next = std::make_shared<double>(0.0);
  return [&ctx, verb, t_end, next](const State& s, const StepRecord& r) {
    if (ctx.quiet || s.t + 1e-12 * t_end < *next) return;
    log_stream(ctx) << verb << ": t=" << format_double(s.t) << " step " << r.step << '\n';
    *next = std::min(t_end, *next + 0.1 * t_end);
    if (*next <= s.t) *next = std::numeric_limits<double>::infinity();
  };
}

int simulate_impl(const RunConfig& config, const CommandContext& ctx, const std::string& verb, bool every_monitor) {
  MonitorToggles toggles = config.monitors;
  if (every_monitor) {
    toggles.energy = toggles.velocity = toggles.density = true;
    toggles.definition1 = toggles.lagrangian = true;
  }
  const MixtureParams& params = config.params;
  const Grid grid = Grid::uniform(config.n);
  const double floor = config.control.scheme.density_floor;
  const State initial = sample_initial(build_initial(config.initial), grid, floor);

  // Time-derivative norms need every level in memory.
  const bool keep_all = toggles.definition1;
  StepControl ctl = config.control;
  ctl.stride = keep_all ? 1 : INT_MAX;

  SampleRecorder recorder(params);
  LevelStore store(config.stride);
  std::array<double, 2> mass0{total_mass(initial.rho[0], grid.h), total_mass(initial.rho[1], grid.h)};
  auto drift = std::make_shared<std::array<double, 2>>(std::array<double, 2>{0.0, 0.0});
  std::vector<Monitor> monitors{std::ref(recorder)};
  if (!keep_all) monitors.push_back([&store](const State& s, const StepRecord& r) { store.offer(r.step, s); });
  monitors.push_back([drift, mass0, h = grid.h](const State& s, const StepRecord&) {
    for (int i = 0; i < 2; ++i) {
      (*drift)[i] = std::max((*drift)[i], std::abs(total_mass(s.rho[i], h) - mass0[i]) / mass0[i]);
    }
  });
  monitors.push_back(progress_monitor(ctx, verb, ctl.t_end));

  Trajectory traj;
  try {
    traj = run(initial, params, ctl, grid, monitors);
  } catch (const Error& e) {
    if (!solver_error(e.code())) throw;
    write_output(ctx, "energy.csv", energy_csv(energy_records(recorder.samples())));
    throw;
  }

  std::vector<State> stored;
  const long last_step = static_cast<long>(traj.step_log.size());
  if (keep_all) {
    LevelStore thin(config.stride);
    for (std::size_t n = 0; n < traj.states.size(); ++n) thin.offer(static_cast<long>(n), traj.states[n]);
    stored = thin.finish(last_step, traj.states.back());
  } else {
    stored = store.finish(last_step, traj.states.back());
  }

  const double B1 = b1(initial, params);
  EstimateReport report;
  for (auto& e : estimate_report(recorder.samples(), params, B1, grid.h, toggles.tol_scale).entries) {
    if (wanted(e.name, toggles)) report.add(std::move(e));
  }
  if (toggles.density) {
    for (int i = 0; i < 2; ++i) {
      report.add(check("mass_rho" + std::to_string(i + 1) + "_drift", (*drift)[i], 1e-8, (*drift)[i] <= 1e-8,
                       "relative change of total mass"));
    }
  }
  if (toggles.definition1) {
    for (auto& e : definition1_norms(traj, params)) report.add(std::move(e));
  }
  if (toggles.lagrangian) {
    const LagrangianSummary lag = lagrangian_report(stored, params, toggles.lagrangian_constant);
    for (const auto& e : lag.entries) report.add(e);
    CsvWriter csv({"t", "chart", "energy_residual", "mean_x", "mean_y", "rho_at_mean", "d_m", "node_gap"});
    for (const auto& r : lag.rows) {
      csv.cell(r.t).cell(r.m + 1).cell(r.energy_residual).cell(r.point.x).cell(r.point.y);
      csv.cell(r.point.rho).cell(r.point.d_m).cell(r.point.node_gap);
      csv.end_row();
    }
    write_output(ctx, "lagrangian.csv", csv.str());
    write_output(ctx, "mass_fields.csv", mass_fields_csv({stored.back()}));
  }

  write_output(ctx, "fields.csv", fields_csv(stored));
  write_output(ctx, "energy.csv", energy_csv(energy_records(recorder.samples())));
  write_output(ctx, "estimates.csv", estimates_csv(report));
  write_output(ctx, "estimates.txt", estimates_text(report));
  return finish(verb, report, ctx);
}

}  // namespace

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::VacuumDegenerate:
    case ErrorCode::SingularSystem:
    case ErrorCode::PositivityLoss:
    case ErrorCode::IntegratorFailure:
    case ErrorCode::InsufficientSampling:
      return kExitSolverFailure;
    default:
      return kExitInputError;
  }
}

std::array<double, 2> heat_mode_exact(const Matrix2& mu, double t) {
  // exp(A) for A = -pi^2 t mu via A = s I + B with B^2 = q2 I.
  const double c = -std::numbers::pi * std::numbers::pi * t;
  const double a11 = c * mu[0][0], a12 = c * mu[0][1], a21 = c * mu[1][0], a22 = c * mu[1][1];
  const double s = 0.5 * (a11 + a22);
  const double b11 = a11 - s;
  const double q2 = b11 * b11 + a12 * a21;
  double f0, f1;  // exp(A) = e^s (f0 I + f1 B)
  if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    f0 = std::cosh(q);
    f1 = std::sinh(q) / q;
  } else if (q2 < 0.0) {
    const double q = std::sqrt(-q2);
    f0 = std::cos(q);
    f1 = std::sin(q) / q;
  } else {
    f0 = 1.0;
    f1 = 1.0;
  }
  const double e = std::exp(s);
  return {e * (f0 + f1 * b11), e * f1 * a21};
}

int command_simulate(const RunConfig& config, const CommandContext& ctx) {
  return simulate_impl(config, ctx, "simulate", false);
}

int command_verify(const RunConfig& config, const CommandContext& ctx) {
  return simulate_impl(config, ctx, "verify", true);
}

int command_mms(const RunConfig& config, const CommandContext& ctx) {
  MmsOptions options;
  options.t_end = config.control.t_end;
  options.dt_factor = config.mms.dt_factor;
  options.scheme = config.control.scheme;
  progress(ctx, "mms: canonical case at " + std::to_string(config.mms.resolutions.size()) + " resolutions");
  const MmsResult result = mms_convergence(canonical_case(), config.params, config.mms.resolutions, options);

  CsvWriter csv({"n", "h", "dt", "err_rho1", "err_rho2", "err_u1", "err_u2", "err_combined", "order_rho1",
                 "order_rho2", "order_u1", "order_u2", "order_combined"});
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const MmsRow& row = result.rows[r];
    csv.cell(row.n).cell(row.h).cell(row.dt);
    for (double e : row.errors) csv.cell(e);
    csv.cell(row.combined);
    // Local order against the previous resolution.
    for (int f = 0; f < 5; ++f) {
      if (r == 0) {
        csv.empty();
        continue;
      }
      const MmsRow& prev = result.rows[r - 1];
      const double a = f < 4 ? prev.errors[f] : prev.combined;
      const double b = f < 4 ? row.errors[f] : row.combined;
      if (a > 0.0 && b > 0.0) csv.cell(std::log(a / b) / std::log(prev.h / row.h));
      else csv.empty();
    }
    csv.end_row();
  }
  write_output(ctx, "mms.csv", csv.str());

  CsvWriter fit({"field", "fitted_order"});
  const char* names[] = {"rho1", "rho2", "u1", "u2"};
  for (int f = 0; f < 4; ++f) fit.cell(std::string(names[f])).cell(result.order[f]).end_row();
  fit.cell(std::string("combined")).cell(result.combined_order).end_row();
  write_output(ctx, "mms_orders.csv", fit.str());

  EstimateReport report;
  // Identically zero errors (NaN order) satisfy any order requirement.
  const bool exact = std::isnan(result.min_order);
  report.add(check("mms_min_order", exact ? 0.0 : result.min_order, config.mms.min_order,
                   exact || result.min_order >= config.mms.min_order, "smallest fitted per-field order"));
  report.entries.back().slack = exact ? 0.0 : result.min_order - config.mms.min_order;
  return finish("mms", report, ctx);
}

int command_uniqueness(const RunConfig& config, const CommandContext& ctx) {
  const Grid grid = Grid::uniform(config.n);
  const InitialData base = build_initial(config.initial);
  const InitialData delta = build_perturbation(config.uniqueness, config.seed);
  progress(ctx, "uniqueness: " + std::to_string(config.uniqueness.eps.size()) + " perturbation sizes");
  const UniquenessResult result = uniqueness_experiment(base, delta, config.uniqueness.eps, config.params,
                                                        config.control, grid, config.uniqueness.gronwall_scale);

  CsvWriter csv({"eps", "sup_total", "sup_ratio", "eta11_initial", "eta12_initial", "eta11_sup", "eta12_sup",
                 "eta2_sup", "eta3_final", "gronwall_ratio", "gronwall_pass"});
  EstimateReport report;
  bool zero_ok = true;
  bool gronwall_ok = true;
  double worst_gronwall = 0.0;
  for (const auto& r : result.rows) {
    csv.cell(r.eps).cell(r.sup_total).cell(r.sup_ratio).cell(r.eta1_initial[0]).cell(r.eta1_initial[1]);
    csv.cell(r.eta1_sup[0]).cell(r.eta1_sup[1]).cell(r.eta2_sup).cell(r.eta3_final);
    if (std::isnan(r.gronwall_ratio)) {
      csv.empty().empty();
    } else {
      csv.cell(r.gronwall_ratio).cell(r.gronwall_pass);
      gronwall_ok = gronwall_ok && r.gronwall_pass;
      worst_gronwall = std::max(worst_gronwall, r.gronwall_ratio);
    }
    csv.end_row();
    if (r.eps == 0.0 && r.sup_total != 0.0) zero_ok = false;
  }
  write_output(ctx, "uniqueness.csv", csv.str());

  double zero_total = 0.0;
  for (const auto& r : result.rows) {
    if (r.eps == 0.0) zero_total = std::max(zero_total, r.sup_total);
  }
  report.add(check("identical_data_functionals", zero_total, 0.0, zero_ok, "eps = 0 gives identical trajectories"));
  const bool spread_ok = std::isnan(result.spread) || result.spread < config.uniqueness.max_spread;
  report.add(check("scaling_spread", std::isnan(result.spread) ? 1.0 : result.spread, config.uniqueness.max_spread,
                   spread_ok, "max/min of sup ratio over eps > 0"));
  report.add(check("gronwall_ratio", worst_gronwall, 1.0, gronwall_ok, "integral Gronwall form"));
  write_output(ctx, "estimates.csv", estimates_csv(report));
  return finish("uniqueness", report, ctx);
}

int command_galerkin(const RunConfig& config, const CommandContext& ctx) {
  const GalerkinBlock& g = config.galerkin;

  // Heat mode: frozen unit density, no pressure, no drag, one mode.
  MixtureParams linear = config.params;
  linear.a = 0.0;
  linear.K = {0.0, 0.0};
  InitialData heat;
  heat.rho0 = {[](double) { return 1.0; }, [](double) { return 1.0; }};
  heat.u0 = {[](double x) { return std::sin(std::numbers::pi * x); }, [](double) { return 0.0; }};
  GalerkinOptions options;
  options.tolerance = g.ode_tol;
  options.freeze_density = true;
  options.levels = 11;
  progress(ctx, "galerkin: heat mode");
  const GalerkinResult heat_run = galerkin_solve(heat, linear, 1, g.horizon, options);

  CsvWriter heat_csv({"t", "c1", "c2", "exact1", "exact2", "error"});
  double heat_error = 0.0;
  for (std::size_t n = 0; n < heat_run.coefficients.size(); ++n) {
    const double t = heat_run.trajectory.states[n].t;
    const auto exact = heat_mode_exact(config.params.mu, t);
    const double c1 = heat_run.coefficients[n][0][0];
    const double c2 = heat_run.coefficients[n][1][0];
    const double err = std::max(std::abs(c1 - exact[0]), std::abs(c2 - exact[1]));
    heat_error = std::max(heat_error, err);
    heat_csv.cell(t).cell(c1).cell(c2).cell(exact[0]).cell(exact[1]).cell(err).end_row();
  }
  write_output(ctx, "galerkin_heat.csv", heat_csv.str());

  // Joint refinement of (modes, cells) against the finite-difference solver.
  const InitialData initial = build_initial(config.initial);
  CsvWriter cross({"modes", "cells", "distance"});
  std::vector<double> distances;
  for (std::size_t k = 0; k < g.modes.size(); ++k) {
    progress(ctx, "galerkin: modes " + std::to_string(g.modes[k]) + ", cells " + std::to_string(g.cells[k]));
    const Grid grid = Grid::uniform(g.cells[k]);
    StepControl ctl = config.control;
    ctl.t_end = g.horizon;
    ctl.stride = INT_MAX;
    const State start = sample_initial(initial, grid, ctl.scheme.density_floor);
    const Trajectory fd = run(start, config.params, ctl, grid);
    GalerkinOptions o;
    o.tolerance = g.ode_tol;
    o.levels = 2;
    o.grid_cells = g.cells[k];
    const GalerkinResult spectral = galerkin_solve(initial, config.params, g.modes[k], g.horizon, o);
    const double d = l2_distance(fd.states.back(), spectral.trajectory.states.back());
    distances.push_back(d);
    cross.cell(g.modes[k]).cell(g.cells[k]).cell(d).end_row();
  }
  write_output(ctx, "galerkin.csv", cross.str());

  EstimateReport report;
  report.add(check("heat_mode_error", heat_error, g.heat_tol, heat_error < g.heat_tol,
                   "single mode against exp(-pi^2 t mu)"));
  bool decreasing = true;
  for (std::size_t k = 1; k < distances.size(); ++k) decreasing = decreasing && distances[k] < distances[k - 1];
  report.add(check("cross_check_decreasing", distances.back(), std::nullopt, decreasing,
                   "distance to the finite-difference solution under joint refinement"));
  write_output(ctx, "estimates.csv", estimates_csv(report));
  return finish("galerkin", report, ctx);
}

int run_command(const std::string& verb, const std::string& config_path, const CommandContext& given) {
  CommandContext ctx = given;
  std::ostream& err = err_stream(ctx);
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const Error& e) {
    err << verb << ": input error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (ctx.out.empty()) ctx.out = config.directory;
  if (ctx.out.empty()) {
    err << verb << ": input error: no output directory (use --out or set directory)\n";
    return kExitInputError;
  }
  try {
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + ctx.out + "': " + ec.message());
    write_output(ctx, "resolved_config", write_config(config));
    if (verb == "simulate") return command_simulate(config, ctx);
    if (verb == "verify") return command_verify(config, ctx);
    if (verb == "mms") return command_mms(config, ctx);
    if (verb == "uniqueness") return command_uniqueness(config, ctx);
    if (verb == "galerkin") return command_galerkin(config, ctx);
    err << "unknown command '" << verb << "'\n";
    return kExitInputError;
  } catch (const Error& e) {
    const int status = exit_status(e.code());
    err << verb << ": " << (status == kExitSolverFailure ? "solver failure: " : "input error: ") << e.what() << '\n';
    return status;
  } catch (const std::exception& e) {
    err << verb << ": solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

}  // namespace bifluid
