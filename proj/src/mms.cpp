#include <cmath>
#include <limits>
#include <numbers>

#include "bifluid/verification.hpp"

namespace bifluid {

using std::numbers::pi;

ManufacturedCase canonical_case() {
  ManufacturedCase c;
  c.name = "canonical";
  const ClosedForm rho{
      [](double x, double t) { return 2.0 + 0.1 * std::sin(2 * pi * x) * std::cos(t); },
      [](double x, double t) { return -0.1 * std::sin(2 * pi * x) * std::sin(t); },
      [](double x, double t) { return 0.2 * pi * std::cos(2 * pi * x) * std::cos(t); },
      [](double x, double t) { return -0.4 * pi * pi * std::sin(2 * pi * x) * std::cos(t); },
  };
  const ClosedForm u{
      [](double x, double t) { return std::sin(pi * x) * std::sin(t); },
      [](double x, double t) { return std::sin(pi * x) * std::cos(t); },
      [](double x, double t) { return pi * std::cos(pi * x) * std::sin(t); },
      [](double x, double t) { return -pi * pi * std::sin(pi * x) * std::sin(t); },
  };
  c.rho = {rho, rho};
  c.u = {u, u};
  return c;
}

ManufacturedCase equilibrium_case(double density) {
  ManufacturedCase c;
  c.name = "equilibrium";
  auto zero = [](double, double) { return 0.0; };
  const ClosedForm rho{[density](double, double) { return density; }, zero, zero, zero};
  const ClosedForm u{zero, zero, zero, zero};
  c.rho = {rho, rho};
  c.u = {u, u};
  return c;
}

SourceTerms manufactured_sources(const ManufacturedCase& mcase, const MixtureParams& params) {
  SourceTerms s;
  s.continuity = [mcase](int i, double x, double t) {
    const auto& r = mcase.rho[i];
    const auto& u = mcase.u[i];
    return r.dt(x, t) + r.dx(x, t) * u.value(x, t) + r.value(x, t) * u.dx(x, t);
  };
  s.momentum = [mcase, params](int i, double x, double t) {
    const auto& r = mcase.rho[i];
    const auto& u = mcase.u[i];
    const double rho = r.value(x, t);
    const double v = u.value(x, t);
    double lhs = rho * (u.dt(x, t) + v * u.dx(x, t)) +
                 params.K[i] * params.gamma[i] * std::pow(rho, params.gamma[i] - 1.0) * r.dx(x, t);
    double rhs = 0.0;
    for (int j = 0; j < 2; ++j) rhs += params.mu[i][j] * mcase.u[j].dxx(x, t);
    const double rel = mcase.u[1].value(x, t) - mcase.u[0].value(x, t);
    rhs += (i == 0 ? 1.0 : -1.0) * params.a * rel;
    return lhs - rhs;
  };
  return s;
}

State exact_state(const ManufacturedCase& mcase, const Grid& grid, double t) {
  State s;
  s.t = t;
  for (int i = 0; i < 2; ++i) {
    s.rho[i].resize(grid.size());
    s.u[i].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      s.rho[i][k] = mcase.rho[i].value(grid.nodes[k], t);
      s.u[i][k] = mcase.u[i].value(grid.nodes[k], t);
    }
    s.u[i].front() = 0.0;
    s.u[i].back() = 0.0;
  }
  return s;
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& errors) {
  const std::size_t n = h.size();
  if (n < 2 || errors.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(errors[k] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(h[k]);
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MmsResult mms_convergence(const ManufacturedCase& mcase, const MixtureParams& params,
                          const std::vector<int>& resolutions, const MmsOptions& options) {
  if (resolutions.size() < 2) throw Error(ErrorCode::InvalidArgument, "convergence study needs at least 2 resolutions");
  MmsResult result;
  auto sources = std::make_shared<SourceTerms>(manufactured_sources(mcase, params));
  for (int n : resolutions) {
    const Grid grid = Grid::uniform(n);
    const long steps = static_cast<long>(std::ceil(options.t_end / (options.dt_factor * grid.h) - 1e-9));
    StepControl ctl;
    ctl.t_end = options.t_end;
    ctl.fixed_dt = options.t_end / static_cast<double>(steps);
    ctl.dt_max = ctl.fixed_dt;
    ctl.stride = static_cast<int>(std::min<long>(steps, 1 << 30));
    ctl.scheme = options.scheme;
    ctl.scheme.sources = sources;

    const State initial = exact_state(mcase, grid, 0.0);
    const Trajectory traj = run(initial, params, ctl, grid);
    const State& final_state = traj.states.back();
    const State exact = exact_state(mcase, grid, final_state.t);

    MmsRow row;
    row.n = n;
    row.h = grid.h;
    row.dt = ctl.fixed_dt;
    Field diff(grid.size());
    double total = 0.0;
    for (int f = 0; f < 4; ++f) {
      const Field& num = f < 2 ? final_state.rho[f] : final_state.u[f - 2];
      const Field& ref = f < 2 ? exact.rho[f] : exact.u[f - 2];
      for (std::size_t k = 0; k < grid.size(); ++k) diff[k] = (num[k] - ref[k]) * (num[k] - ref[k]);
      const double e2 = trapezoid(diff, grid.h);
      row.errors[f] = std::sqrt(e2);
      total += e2;
    }
    row.combined = std::sqrt(total);
    result.rows.push_back(row);
  }

  std::vector<double> hs;
  for (const auto& r : result.rows) hs.push_back(r.h);
  result.min_order = std::numeric_limits<double>::infinity();
  for (int f = 0; f < 4; ++f) {
    std::vector<double> e;
    for (const auto& r : result.rows) e.push_back(r.errors[f]);
    result.order[f] = fitted_order(hs, e);
    if (!std::isnan(result.order[f])) result.min_order = std::min(result.min_order, result.order[f]);
  }
  std::vector<double> e;
  for (const auto& r : result.rows) e.push_back(r.combined);
  result.combined_order = fitted_order(hs, e);
  if (std::isinf(result.min_order)) result.min_order = std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace bifluid
