#include "bifluid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bifluid {

void EstimateReport::append(const EstimateReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool EstimateReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const EstimateEntry& e) { return e.pass; });
}

const EstimateEntry* EstimateReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

double energy(const State& state, const MixtureParams& params) {
  const double h = state.spacing();
  Field density(state.size());
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double coeff = params.K[i] / (params.gamma[i] - 1.0);
    for (std::size_t k = 0; k < state.size(); ++k) {
      const double r = state.rho[i][k];
      const double v = state.u[i][k];
      density[k] = 0.5 * r * v * v + coeff * std::pow(r, params.gamma[i]);
    }
    total += trapezoid(density, h);
  }
  return total;
}

double gradient_norm2(std::span<const double> f, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const double g = (f[k + 1] - f[k]) / h;
    sum += g * g;
  }
  return h * sum;
}

double dissipation(const State& state, const MixtureParams& params) {
  const double h = state.spacing();
  double grad = 0.0;
  for (int i = 0; i < 2; ++i) grad += gradient_norm2(state.u[i], h);
  Field rel(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) {
    const double d = state.u[0][k] - state.u[1][k];
    rel[k] = d * d;
  }
  return params.M0 * grad + params.a * trapezoid(rel, h);
}

namespace {

StepSample make_sample(const State& state, const MixtureParams& params, const StepSample* previous) {
  StepSample s;
  s.energy.t = state.t;
  s.energy.E = energy(state, params);
  s.energy.D = dissipation(state, params);
  if (previous) {
    s.dt = state.t - previous->energy.t;
    s.energy.D_int = previous->energy.D_int + s.dt * s.energy.D;
  }
  for (int i = 0; i < 2; ++i) {
    double sup = 0.0;
    for (double v : state.u[i]) sup = std::max(sup, std::abs(v));
    s.u_sup[i] = sup;
    const auto [lo, hi] = std::minmax_element(state.rho[i].begin(), state.rho[i].end());
    s.rho_min[i] = *lo;
    s.rho_max[i] = *hi;
  }
  return s;
}

double max_dt(const std::vector<StepSample>& samples) {
  double dt = 0.0;
  for (const auto& s : samples) dt = std::max(dt, s.dt);
  return dt;
}

}  // namespace

void SampleRecorder::operator()(const State& state, const StepRecord&) {
  samples_.push_back(make_sample(state, params_, samples_.empty() ? nullptr : &samples_.back()));
}

std::vector<StepSample> samples_from(const Trajectory& traj, const MixtureParams& params) {
  std::vector<StepSample> out;
  out.reserve(traj.states.size());
  for (const auto& state : traj.states) out.push_back(make_sample(state, params, out.empty() ? nullptr : &out.back()));
  return out;
}

std::vector<EnergyRecord> energy_records(const std::vector<StepSample>& samples) {
  std::vector<EnergyRecord> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.energy);
  return out;
}

std::vector<double> energy_slack(const std::vector<StepSample>& samples, double B1) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(B1 - (s.energy.E + s.energy.D_int));
  return out;
}

double energy_violation(const std::vector<StepSample>& samples, double B1) {
  double worst = 0.0;
  for (double slack : energy_slack(samples, B1)) worst = std::max(worst, -slack);
  return worst;
}

EstimateEntry check_energy_inequality(const std::vector<StepSample>& samples, double B1, double h,
                                      double tol_scale) {
  EstimateEntry e;
  e.name = "energy_inequality";
  e.bound = B1;
  const double dt = max_dt(samples);
  const auto slack = energy_slack(samples, B1);
  double tightest = std::numeric_limits<double>::infinity();
  e.pass = true;
  e.slack = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double tol = tol_scale * (h + dt) * B1 * samples[n].energy.t;
    const double margin = slack[n] + tol;
    e.observed = std::max(e.observed, samples[n].energy.E + samples[n].energy.D_int);
    if (margin < tightest) {
      tightest = margin;
      e.slack = slack[n];
      e.tolerance = tol;
    }
    if (slack[n] < -tol) e.pass = false;
  }
  e.note = "E(t) + int_0^t D <= B1";
  return e;
}

EstimateEntry check_energy_inequality(const Trajectory& traj, const MixtureParams& params, double tol_scale) {
  const auto samples = samples_from(traj, params);
  return check_energy_inequality(samples, b1(traj.states.front(), params), traj.states.front().spacing(),
                                 tol_scale);
}

std::vector<EstimateEntry> velocity_bound(const std::vector<StepSample>& samples, const MixtureParams& params,
                                          double B1, double h, double tol_scale) {
  const double bound = std::sqrt(B1 / params.M0);
  const double tol = bound * tol_scale * (h + max_dt(samples));
  std::vector<EstimateEntry> out;
  for (int i = 0; i < 2; ++i) {
    // Right-point rule, matching the accumulation of D_int.
    double integral = 0.0;
    for (std::size_t n = 1; n < samples.size(); ++n) integral += samples[n].dt * samples[n].u_sup[i] * samples[n].u_sup[i];
    EstimateEntry e;
    e.name = "velocity_L2_Linf_u" + std::to_string(i + 1);
    e.bound = bound;
    e.observed = std::sqrt(integral);
    e.slack = bound - e.observed;
    e.tolerance = tol;
    e.pass = *e.slack >= -tol;
    e.note = "||u_i||_L2(0,T;Linf) <= sqrt(B1/M0)";
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EstimateEntry> velocity_bound(const Trajectory& traj, const MixtureParams& params, double tol_scale) {
  const auto samples = samples_from(traj, params);
  return velocity_bound(samples, params, b1(traj.states.front(), params), traj.states.front().spacing(), tol_scale);
}

std::vector<EstimateEntry> density_report(const std::vector<StepSample>& samples) {
  std::vector<EstimateEntry> out;
  for (int i = 0; i < 2; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.rho_min[i]);
      hi = std::max(hi, s.rho_max[i]);
    }
    const std::string id = "rho" + std::to_string(i + 1);
    EstimateEntry inf;
    inf.name = id + "_inf";
    inf.bound = 0.0;
    inf.observed = lo;
    inf.slack = lo;
    inf.pass = lo > 0.0;
    inf.note = "strict positivity";
    out.push_back(inf);

    EstimateEntry sup;
    sup.name = id + "_sup";
    sup.observed = hi;
    sup.pass = std::isfinite(hi);
    sup.note = kNoBound;
    out.push_back(sup);
  }
  return out;
}

std::vector<EstimateEntry> density_report(const Trajectory& traj) {
  std::vector<StepSample> samples;
  MixtureParams unused;
  unused.M0 = 1.0;
  for (const auto& state : traj.states) samples.push_back(make_sample(state, unused, nullptr));
  return density_report(samples);
}

Field second_derivative(std::span<const double> f, double h) {
  const std::size_t size = f.size();
  Field out(size, 0.0);
  for (std::size_t k = 1; k + 1 < size; ++k) out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
  if (size >= 4) {
    out[0] = 2.0 * out[1] - out[2];
    out[size - 1] = 2.0 * out[size - 2] - out[size - 3];
  }
  return out;
}

Definition1Norms compute_definition1_norms(const Trajectory& traj, const MixtureParams& params) {
  const auto& states = traj.states;
  if (states.size() < 3) {
    throw Error(ErrorCode::InsufficientSampling, "norm inventory needs at least 3 stored time levels");
  }
  const double h = states.front().spacing();
  const std::size_t size = states.front().size();
  Definition1Norms out;
  std::array<double, 2> dxx_sq{0.0, 0.0};
  std::array<double, 2> dt_sq{0.0, 0.0};
  std::array<double, 2> accumulated{0.0, 0.0};
  const std::array<double, 2> visc{params.mu[0][0], params.mu[1][1]};

  std::array<double, 2> dxx_prev_l2{0.0, 0.0};
  std::array<double, 2> visc_prev{0.0, 0.0};
  Field work(size);

  for (std::size_t n = 0; n < states.size(); ++n) {
    const State& s = states[n];
    std::array<double, 2> functional{};
    for (int i = 0; i < 2; ++i) {
      out.dx_rho[i] = std::max(out.dx_rho[i], std::sqrt(gradient_norm2(s.rho[i], h)));
      for (std::size_t k = 0; k < size; ++k) work[k] = std::log(s.rho[i][k]);
      out.dx_log_rho[i] = std::max(out.dx_log_rho[i], std::sqrt(gradient_norm2(work, h)));
      const double grad_u = gradient_norm2(s.u[i], h);
      out.dx_u[i] = std::max(out.dx_u[i], std::sqrt(grad_u));

      const Field dxx = second_derivative(s.u[i], h);
      for (std::size_t k = 0; k < size; ++k) work[k] = dxx[k] * dxx[k];
      const double dxx_l2 = trapezoid(work, h);
      for (std::size_t k = 0; k < size; ++k) work[k] = visc[i] * visc[i] / s.rho[i][k] * dxx[k] * dxx[k];
      const double visc_term = trapezoid(work, h);

      if (n > 0) {
        const State& prev = states[n - 1];
        const double dt = s.t - prev.t;
        if (!(dt > 0.0)) throw Error(ErrorCode::InsufficientSampling, "stored times must be strictly increasing");
        for (std::size_t k = 0; k < size; ++k) {
          const double d = (s.rho[i][k] - prev.rho[i][k]) / dt;
          work[k] = d * d;
        }
        out.dt_rho[i] = std::max(out.dt_rho[i], std::sqrt(trapezoid(work, h)));
        for (std::size_t k = 0; k < size; ++k) {
          const double d = (s.u[i][k] - prev.u[i][k]) / dt;
          work[k] = d * d;
        }
        const double dt_u = trapezoid(work, h);
        dt_sq[i] += dt * dt_u;
        for (std::size_t k = 0; k < size; ++k) {
          const double d = (s.u[i][k] - prev.u[i][k]) / dt;
          work[k] = 0.5 * (s.rho[i][k] + prev.rho[i][k]) * d * d;
        }
        const double inertia = trapezoid(work, h);
        dxx_sq[i] += 0.5 * dt * (dxx_l2 + dxx_prev_l2[i]);
        accumulated[i] += dt * inertia + 0.5 * dt * (visc_term + visc_prev[i]);
      }
      dxx_prev_l2[i] = dxx_l2;
      visc_prev[i] = visc_term;
      functional[i] = visc[i] * grad_u + accumulated[i];
    }
    out.times.push_back(s.t);
    out.alpha.push_back(functional[0]);
    out.beta.push_back(functional[1]);
  }
  for (int i = 0; i < 2; ++i) {
    out.dxx_u[i] = std::sqrt(dxx_sq[i]);
    out.dt_u[i] = std::sqrt(dt_sq[i]);
  }
  return out;
}

std::vector<EstimateEntry> definition1_norms(const Trajectory& traj, const MixtureParams& params) {
  const Definition1Norms norms = compute_definition1_norms(traj, params);
  std::vector<EstimateEntry> out;
  auto observed = [&](std::string name, double value) {
    EstimateEntry e;
    e.name = std::move(name);
    e.observed = value;
    e.pass = std::isfinite(value);
    e.note = kNoBound;
    out.push_back(std::move(e));
  };
  for (int i = 0; i < 2; ++i) {
    const std::string c = std::to_string(i + 1);
    observed("dx_rho" + c + "_Linf_L2", norms.dx_rho[i]);
    observed("dt_rho" + c + "_Linf_L2", norms.dt_rho[i]);
    observed("dx_log_rho" + c + "_Linf_L2", norms.dx_log_rho[i]);
    observed("dx_u" + c + "_Linf_L2", norms.dx_u[i]);
    observed("dxx_u" + c + "_L2_QT", norms.dxx_u[i]);
    observed("dt_u" + c + "_L2_QT", norms.dt_u[i]);
  }
  observed("alpha_sup", *std::max_element(norms.alpha.begin(), norms.alpha.end()));
  observed("beta_sup", *std::max_element(norms.beta.begin(), norms.beta.end()));
  return out;
}

EstimateReport estimate_report(const std::vector<StepSample>& samples, const MixtureParams& params, double B1,
                               double h, double tol_scale) {
  EstimateReport report;
  report.add(check_energy_inequality(samples, B1, h, tol_scale));
  for (auto& e : velocity_bound(samples, params, B1, h, tol_scale)) report.add(std::move(e));
  for (auto& e : density_report(samples)) report.add(std::move(e));
  return report;
}

}  // namespace bifluid
