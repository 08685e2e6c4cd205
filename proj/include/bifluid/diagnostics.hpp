#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bifluid/core.hpp"
#include "bifluid/solver.hpp"

namespace bifluid {

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  double D_int = 0.0;
};

/// Per-time-level quantities needed by the estimate checks.
struct StepSample {
  EnergyRecord energy;
  std::array<double, 2> u_sup{0.0, 0.0};
  std::array<double, 2> rho_min{0.0, 0.0};
  std::array<double, 2> rho_max{0.0, 0.0};
  double dt = 0.0;  // step that produced this level (0 for the first)
};

struct EstimateEntry {
  std::string name;
  std::optional<double> bound;  // empty: the estimate has no computable bound
  double observed = 0.0;
  std::optional<double> slack;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct EstimateReport {
  std::vector<EstimateEntry> entries;

  void add(EstimateEntry entry) { entries.push_back(std::move(entry)); }
  void append(const EstimateReport& other);
  bool all_pass() const;
  const EstimateEntry* find(const std::string& name) const;
};

inline constexpr const char* kNoBound = "no computable bound available";

double energy(const State& state, const MixtureParams& params);

/// Energy of the initial state; the right-hand side of the energy estimate.
inline double b1(const State& initial, const MixtureParams& params) { return energy(initial, params); }

/// Sum of squared cell gradients, h * sum ((f[k+1]-f[k])/h)^2.
double gradient_norm2(std::span<const double> f, double h);

double dissipation(const State& state, const MixtureParams& params);

/// Monitor that accumulates one StepSample per time level. D_int uses the
/// dissipation at the new level (right-point rule, like the implicit viscosity).
class SampleRecorder {
 public:
  explicit SampleRecorder(MixtureParams params) : params_(std::move(params)) {}

  void operator()(const State& state, const StepRecord& record);
  const std::vector<StepSample>& samples() const { return samples_; }

 private:
  MixtureParams params_;
  std::vector<StepSample> samples_;
};

std::vector<StepSample> samples_from(const Trajectory& traj, const MixtureParams& params);

std::vector<EnergyRecord> energy_records(const std::vector<StepSample>& samples);

/// B1 - (E(t) + D_int(t)) at every sampled time.
std::vector<double> energy_slack(const std::vector<StepSample>& samples, double B1);

/// Largest amount by which E + D_int exceeds B1 (0 when never exceeded).
double energy_violation(const std::vector<StepSample>& samples, double B1);

/// Passes when slack(t) >= -tol_scale * (h + dt) * B1 * t at every sample.
EstimateEntry check_energy_inequality(const std::vector<StepSample>& samples, double B1, double h,
                                      double tol_scale);
EstimateEntry check_energy_inequality(const Trajectory& traj, const MixtureParams& params,
                                      double tol_scale);

/// (int_0^T max_k |u_i|^2)^(1/2) against sqrt(B1/M0); tolerance bound*tol_scale*(h+dt).
std::vector<EstimateEntry> velocity_bound(const std::vector<StepSample>& samples, const MixtureParams& params,
                                          double B1, double h, double tol_scale = 2.0);
std::vector<EstimateEntry> velocity_bound(const Trajectory& traj, const MixtureParams& params,
                                          double tol_scale = 2.0);

std::vector<EstimateEntry> density_report(const std::vector<StepSample>& samples);
std::vector<EstimateEntry> density_report(const Trajectory& traj);

struct Definition1Norms {
  std::array<double, 2> dx_rho{};   // sup_t ||d_x rho_i||_L2
  std::array<double, 2> dt_rho{};   // sup_t ||d_t rho_i||_L2 (forward differences)
  std::array<double, 2> dx_log_rho{};  // sup_t ||d_x log rho_i||_L2
  std::array<double, 2> dx_u{};     // sup_t ||d_x u_i||_L2
  std::array<double, 2> dxx_u{};    // ||d_xx u_i||_L2(Q_T)
  std::array<double, 2> dt_u{};     // ||d_t u_i||_L2(Q_T)
  std::vector<double> times;
  std::vector<double> alpha;        // component-1 functional per stored level
  std::vector<double> beta;         // component-2 functional per stored level
};

/// Needs stride-1 storage and at least 3 levels (InsufficientSampling otherwise).
Definition1Norms compute_definition1_norms(const Trajectory& traj, const MixtureParams& params);
std::vector<EstimateEntry> definition1_norms(const Trajectory& traj, const MixtureParams& params);

/// Second difference at interior nodes with linear extrapolation to the ends.
Field second_derivative(std::span<const double> f, double h);

/// Full monitor set over a solver trajectory recorded with SampleRecorder.
EstimateReport estimate_report(const std::vector<StepSample>& samples, const MixtureParams& params,
                               double B1, double h, double tol_scale);

}  // namespace bifluid
