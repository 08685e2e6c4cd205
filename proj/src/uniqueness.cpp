#include <algorithm>
#include <cmath>
#include <limits>

#include "bifluid/verification.hpp"

namespace bifluid {

namespace {

double sup_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double sup_gradient(std::span<const double> f, double h) {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) m = std::max(m, std::abs(f[k + 1] - f[k]) / h);
  return m;
}

void check_pair(const Trajectory& first, const Trajectory& second) {
  if (first.states.size() != second.states.size() || first.states.empty()) {
    throw Error(ErrorCode::InvalidArgument, "trajectories must have the same number of stored levels");
  }
  for (std::size_t n = 0; n < first.states.size(); ++n) {
    if (first.states[n].size() != second.states[n].size() ||
        std::abs(first.states[n].t - second.states[n].t) > 1e-12 * std::max(1.0, first.states[n].t)) {
      throw Error(ErrorCode::InvalidArgument, "trajectories must be stored at identical times on one grid");
    }
  }
}

}  // namespace

DifferenceFunctionals difference_functionals(const Trajectory& first, const Trajectory& second,
                                             const MixtureParams& params) {
  check_pair(first, second);
  DifferenceFunctionals out;
  const std::size_t size = first.states.front().size();
  const double h = first.states.front().spacing();
  Field work(size), du(size);
  double eta3 = 0.0;
  for (std::size_t n = 0; n < first.states.size(); ++n) {
    const State& a = first.states[n];
    const State& b = second.states[n];
    double eta2 = 0.0;
    double grad = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < size; ++k) {
        const double d = a.rho[i][k] - b.rho[i][k];
        work[k] = d * d;
      }
      out.eta1[i].push_back(trapezoid(work, h));
      for (std::size_t k = 0; k < size; ++k) {
        du[k] = a.u[i][k] - b.u[i][k];
        work[k] = a.rho[i][k] * du[k] * du[k];
      }
      eta2 += 0.5 * trapezoid(work, h);
      grad += gradient_norm2(du, h);
    }
    if (n > 0) eta3 += (a.t - first.states[n - 1].t) * params.M0 * grad;
    out.t.push_back(a.t);
    out.eta2.push_back(eta2);
    out.eta3.push_back(eta3);
  }
  return out;
}

GronwallCheck gronwall_bound_check(const DifferenceFunctionals& funcs, const Trajectory& first,
                                   const Trajectory& second, const MixtureParams& params, double tol_scale) {
  check_pair(first, second);
  const std::size_t levels = first.states.size();
  if (levels < 3 || funcs.t.size() != levels) {
    throw Error(ErrorCode::InsufficientSampling, "Gronwall check needs at least 3 common time levels");
  }
  if (funcs.eta1[0].front() != 0.0 || funcs.eta1[1].front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "Gronwall check requires identical initial densities");
  }
  const double h = first.states.front().spacing();
  const double M0 = params.M0;

  // Space-time suprema over the whole horizon.
  std::array<double, 2> rho_sup{0, 0}, rho2_sup{0, 0}, inv_rho1{0, 0}, u2_sup{0, 0}, drho2{0, 0};
  for (std::size_t n = 0; n < levels; ++n) {
    for (int i = 0; i < 2; ++i) {
      const auto& r1 = first.states[n].rho[i];
      const auto& r2 = second.states[n].rho[i];
      const double r2max = *std::max_element(r2.begin(), r2.end());
      rho_sup[i] = std::max({rho_sup[i], *std::max_element(r1.begin(), r1.end()), r2max});
      rho2_sup[i] = std::max(rho2_sup[i], r2max);
      inv_rho1[i] = std::max(inv_rho1[i], 1.0 / *std::min_element(r1.begin(), r1.end()));
      u2_sup[i] = std::max(u2_sup[i], sup_abs(second.states[n].u[i]));
      drho2[i] = std::max(drho2[i], std::sqrt(gradient_norm2(r2, h)));
    }
  }

  // Density-difference growth: eta1_i' <= c26(t) eta1_i + c27 ||d_x u_i||^2.
  std::vector<double> c26(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      worst = std::max(worst, sup_gradient(first.states[n].u[i], h) + rho2_sup[i] * rho2_sup[i] + 1.0);
    }
    c26[n] = worst;
  }
  double int26 = 0.0;
  for (std::size_t n = 1; n < levels; ++n) int26 += 0.5 * (funcs.t[n] - funcs.t[n - 1]) * (c26[n] + c26[n - 1]);
  double c27 = 0.0;
  for (int i = 0; i < 2; ++i) c27 = std::max(c27, 1.0 + drho2[i] * drho2[i]);
  const double c28 = c27 * std::exp(int26);
  const double c34 = c28 / M0;  // sum eta1_i <= c34 eta3

  double c29 = 0.0, c32 = 0.0, inv1 = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double lip = params.K[i] * params.gamma[i] * std::pow(rho_sup[i], params.gamma[i] - 1.0);
    c29 = std::max(c29, lip * lip / M0);
    c32 = std::max(c32, 0.5 * u2_sup[i] * u2_sup[i]);
    inv1 = std::max(inv1, inv_rho1[i]);
  }

  GronwallCheck out;
  out.rate.resize(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const std::size_t a = n + 1 < levels ? n : n - 1;
    const double dt = funcs.t[a + 1] - funcs.t[a];
    double c30 = 0.0, dxu2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const auto& u_next = second.states[a + 1].u[i];
      const auto& u_now = second.states[a].u[i];
      Field work(u_now.size());
      for (std::size_t k = 0; k < work.size(); ++k) {
        const double d = (u_next[k] - u_now[k]) / dt;
        work[k] = d * d;
      }
      c30 = std::max(c30, trapezoid(work, h) / M0);
      dxu2 = std::max(dxu2, sup_gradient(second.states[n].u[i], h));
    }
    const double c31 = 2.0 * dxu2;
    const double c33 = dxu2 * dxu2 * inv1;
    out.rate[n] = c31 + c33 + 2.0 * c34 * (c29 + c30 + c32);
  }

  const double g0 = funcs.eta2.front() + 0.5 * funcs.eta3.front();
  double integral = 0.0;
  out.ratio.resize(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    if (n > 0) integral += 0.5 * (funcs.t[n] - funcs.t[n - 1]) * (out.rate[n] + out.rate[n - 1]);
    const double g = funcs.eta2[n] + 0.5 * funcs.eta3[n];
    double ratio;
    if (g == 0.0) {
      ratio = 0.0;
    } else if (g0 == 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    } else {
      ratio = g / (g0 * std::exp(integral));
    }
    out.ratio[n] = ratio;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }

  double dt_max = 0.0;
  for (std::size_t n = 1; n < levels; ++n) dt_max = std::max(dt_max, funcs.t[n] - funcs.t[n - 1]);
  out.entry.name = "gronwall_integral_form";
  out.entry.bound = 1.0;
  out.entry.observed = out.worst_ratio;
  out.entry.tolerance = tol_scale * (h + dt_max);
  out.entry.slack = 1.0 - out.worst_ratio;
  out.entry.pass = out.worst_ratio <= 1.0 + out.entry.tolerance;
  out.entry.note = "eta2 + eta3/2 <= (eta2 + eta3/2)(0) exp(int rate)";
  return out;
}

InitialData perturbed(const InitialData& base, const InitialData& delta, double eps) {
  InitialData out;
  for (int i = 0; i < 2; ++i) {
    auto combine = [eps](Profile b, Profile d) -> Profile {
      if (eps == 0.0 || !d) return b;
      return [b, d, eps](double x) { return b(x) + eps * d(x); };
    };
    out.rho0[i] = combine(base.rho0[i], delta.rho0[i]);
    out.u0[i] = combine(base.u0[i], delta.u0[i]);
  }
  return out;
}

UniquenessResult uniqueness_experiment(const InitialData& base, const InitialData& delta,
                                       const std::vector<double>& eps_list, const MixtureParams& params,
                                       const StepControl& ctl, const Grid& grid, double gronwall_tol_scale) {
  const double floor = ctl.scheme.density_floor;
  const State base_state = sample_initial(base, grid, floor);
  StepControl common = ctl;
  common.stride = 1;
  if (common.fixed_dt <= 0.0) common.fixed_dt = stable_dt(base_state, params, ctl, grid);
  const Trajectory reference = run(base_state, params, common, grid);

  UniquenessResult result;
  result.h = grid.h;
  result.dt = common.fixed_dt;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double eps : eps_list) {
    const State start = sample_initial(perturbed(base, delta, eps), grid, floor);
    const Trajectory other = run(start, params, common, grid);
    const DifferenceFunctionals f = difference_functionals(reference, other, params);

    UniquenessRow row;
    row.eps = eps;
    for (std::size_t n = 0; n < f.t.size(); ++n) {
      const double total = f.eta1[0][n] + f.eta1[1][n] + 2.0 * f.eta2[n] + f.eta3[n];
      row.sup_total = std::max(row.sup_total, total);
      for (int i = 0; i < 2; ++i) row.eta1_sup[i] = std::max(row.eta1_sup[i], f.eta1[i][n]);
      row.eta2_sup = std::max(row.eta2_sup, f.eta2[n]);
    }
    row.eta1_initial = {f.eta1[0].front(), f.eta1[1].front()};
    row.eta3_final = f.eta3.back();
    row.sup_ratio = eps > 0.0 ? row.sup_total / (eps * eps) : row.sup_total;
    if (row.eta1_initial[0] == 0.0 && row.eta1_initial[1] == 0.0 && f.t.size() >= 3) {
      const GronwallCheck g = gronwall_bound_check(f, reference, other, params, gronwall_tol_scale);
      row.gronwall_ratio = g.worst_ratio;
      row.gronwall_pass = g.entry.pass;
    } else {
      row.gronwall_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    if (eps > 0.0) {
      lo = std::min(lo, row.sup_ratio);
      hi = std::max(hi, row.sup_ratio);
    }
    result.rows.push_back(row);
  }
  result.spread = hi > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace bifluid
