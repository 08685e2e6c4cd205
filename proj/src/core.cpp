#include "bifluid/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bifluid {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DragNotPositive: return "drag-not-positive";
    case ErrorCode::PressureCoefficientNotPositive: return "pressure-coefficient-not-positive";
    case ErrorCode::AdiabaticExponentTooSmall: return "adiabatic-exponent-too-small";
    case ErrorCode::NotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::NonFiniteInput: return "non-finite-input";
    case ErrorCode::NonPositiveDensity: return "non-positive-density";
    case ErrorCode::VacuumDegenerate: return "vacuum-degenerate";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::InsufficientSampling: return "insufficient-sampling";
    case ErrorCode::PositivityLoss: return "positivity-loss";
    case ErrorCode::IntegratorFailure: return "integrator-failure";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ValidationError: return "validation-error";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

Grid Grid::uniform(int cells) {
  if (cells < 4) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 4 cells");
  }
  Grid g;
  g.n = cells;
  g.h = 1.0 / cells;
  g.nodes.resize(cells + 1);
  for (int k = 0; k <= cells; ++k) g.nodes[k] = static_cast<double>(k) / cells;
  return g;
}

Profile tabulated(std::vector<double> x, std::vector<double> values) {
  if (x.size() != values.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "tabulated profile needs matching arrays of length >= 2");
  }
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (!(x[k] > x[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "tabulated abscissae must be strictly increasing");
    }
  }
  return [x = std::move(x), v = std::move(values)](double s) {
    if (s <= x.front()) return v.front();
    if (s >= x.back()) return v.back();
    auto it = std::upper_bound(x.begin(), x.end(), s);
    std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    double w = (s - x[k]) / (x[k + 1] - x[k]);
    return (1.0 - w) * v[k] + w * v[k + 1];
  };
}

double compute_M0(const Matrix2& mu) {
  for (const auto& row : mu) {
    for (double m : row) {
      if (!std::isfinite(m)) throw Error(ErrorCode::NonFiniteInput, "viscosity matrix has non-finite entries");
    }
  }
  const double p = mu[0][0];
  const double r = mu[1][1];
  const double q = 0.5 * (mu[0][1] + mu[1][0]);
  const double mean = 0.5 * (p + r);
  const double radius = std::hypot(0.5 * (p - r), q);
  const double m0 = mean - radius;
  if (!(m0 > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "viscosity matrix is not positive definite");
  }
  return m0;
}

MixtureParams validate_params(const MixtureParams& params) {
  MixtureParams out = params;
  if (!std::isfinite(params.a) || !(params.a > 0.0)) {
    throw Error(ErrorCode::DragNotPositive, "drag must be positive");
  }
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(params.K[i]) || !(params.K[i] > 0.0)) {
      throw Error(ErrorCode::PressureCoefficientNotPositive, "pressure coefficient must be positive");
    }
    if (!std::isfinite(params.gamma[i]) || !(params.gamma[i] > 1.0)) {
      throw Error(ErrorCode::AdiabaticExponentTooSmall, "adiabatic exponent must exceed 1");
    }
  }
  out.M0 = compute_M0(params.mu);
  out.non_triangular = params.mu[0][1] != 0.0;
  if (out.non_triangular && params.triangular_enforced) {
    throw Error(ErrorCode::ValidationError, "mu12 must be zero when the triangular structure is enforced");
  }
  return out;
}

void check_state(const State& state, double density_floor) {
  const std::size_t size = state.size();
  for (int i = 0; i < 2; ++i) {
    if (state.rho[i].size() != size || state.u[i].size() != size) {
      throw Error(ErrorCode::InvalidArgument, "state arrays have inconsistent lengths");
    }
  }
  if (size < 5) throw Error(ErrorCode::InvalidArgument, "state needs at least 4 cells");
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < size; ++k) {
      const double r = state.rho[i][k];
      if (!std::isfinite(r) || !std::isfinite(state.u[i][k])) {
        throw Error(ErrorCode::NonFiniteInput, "state contains non-finite values");
      }
      if (!(r > density_floor)) {
        std::ostringstream msg;
        msg << "density rho" << (i + 1) << " = " << r << " at node " << k
            << " is not above the floor " << density_floor;
        throw Error(ErrorCode::NonPositiveDensity, msg.str());
      }
    }
    if (state.u[i].front() != 0.0 || state.u[i].back() != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "boundary velocities must vanish");
    }
  }
}

State sample_initial(const InitialData& data, const Grid& grid, double density_floor) {
  State s;
  s.t = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (!data.rho0[i] || !data.u0[i]) {
      throw Error(ErrorCode::InvalidArgument, "initial data profile missing");
    }
    s.rho[i].resize(grid.size());
    s.u[i].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      s.rho[i][k] = data.rho0[i](grid.nodes[k]);
      s.u[i][k] = data.u0[i](grid.nodes[k]);
    }
    s.u[i].front() = 0.0;
    s.u[i].back() = 0.0;
  }
  check_state(s, density_floor);
  return s;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double interior = 0.0;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) interior += f[k];
  return h * (0.5 * (f.front() + f.back()) + interior);
}

}  // namespace bifluid
