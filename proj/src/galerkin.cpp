#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "bifluid/lagrangian.hpp"
#include "bifluid/verification.hpp"

namespace bifluid {

namespace {

namespace odeint = boost::numeric::odeint;
using std::numbers::pi;
using OdeState = std::vector<double>;

// Chebyshev-Gauss-Lobatto points mapped to [0,1] with barycentric weights,
// Clenshaw-Curtis quadrature weights and the collocation derivative matrix.
struct ChebyshevGrid {
  Eigen::VectorXd x, bary, quad;
  Eigen::MatrixXd diff;

  explicit ChebyshevGrid(int N) : x(N + 1), bary(N + 1), quad(N + 1), diff(N + 1, N + 1) {
    for (int j = 0; j <= N; ++j) {
      x[j] = 0.5 * (1.0 - std::cos(pi * j / N));
      bary[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
    }
    for (int i = 0; i <= N; ++i) {
      double row = 0.0;
      for (int j = 0; j <= N; ++j) {
        if (i == j) continue;
        diff(i, j) = (bary[j] / bary[i]) / (x[i] - x[j]);
        row += diff(i, j);
      }
      diff(i, i) = -row;
    }
    // Clenshaw-Curtis on [-1,1], halved for [0,1].
    for (int k = 0; k <= N; ++k) {
      const double theta = pi * k / N;
      double sum = 0.0;
      for (int j = 1; j <= N / 2; ++j) {
        const double b = (2 * j == N) ? 1.0 : 2.0;
        sum += b / (4.0 * j * j - 1.0) * std::cos(2.0 * j * theta);
      }
      const double c = (k == 0 || k == N) ? 1.0 : 2.0;
      quad[k] = 0.5 * c / N * (1.0 - sum);
    }
  }

  double interpolate(const Eigen::VectorXd& f, double s) const {
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double d = s - x[j];
      if (d == 0.0) return f[j];
      const double w = bary[j] / d;
      num += w * f[j];
      den += w;
    }
    return num / den;
  }
};

class GalerkinSystem {
 public:
  GalerkinSystem(const MixtureParams& params, int modes, int N, bool freeze)
      : params_(params), modes_(modes), points_(N + 1), freeze_(freeze), cheb_(N),
        sine_(modes, N + 1), dsine_(modes, N + 1) {
    for (int l = 0; l < modes; ++l) {
      const double k = (l + 1) * pi;
      for (int j = 0; j <= N; ++j) {
        sine_(l, j) = std::sin(k * cheb_.x[j]);
        dsine_(l, j) = k * std::cos(k * cheb_.x[j]);
      }
    }
  }

  std::size_t size() const { return 2 * points_ + 2 * modes_; }
  const ChebyshevGrid& grid() const { return cheb_; }

  Eigen::Map<const Eigen::VectorXd> density(const OdeState& y, int i) const {
    return {y.data() + i * points_, static_cast<Eigen::Index>(points_)};
  }
  Eigen::Map<const Eigen::VectorXd> coefficients(const OdeState& y, int i) const {
    return {y.data() + 2 * points_ + i * modes_, static_cast<Eigen::Index>(modes_)};
  }

  void operator()(const OdeState& y, OdeState& dydt, double t) const {
    dydt.assign(y.size(), 0.0);
    std::array<Eigen::VectorXd, 2> u, ux;
    for (int i = 0; i < 2; ++i) {
      const auto rho = density(y, i);
      if (!(rho.minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "positivity loss at t=" << t << " in density rho" << (i + 1);
        throw Error(ErrorCode::PositivityLoss, msg.str());
      }
      const auto c = coefficients(y, i);
      u[i] = sine_.transpose() * c;
      ux[i] = dsine_.transpose() * c;
    }
    const Eigen::VectorXd& w = cheb_.quad;
    for (int i = 0; i < 2; ++i) {
      const auto rho = density(y, i);
      if (!freeze_) {
        Eigen::Map<Eigen::VectorXd> drho(dydt.data() + i * points_, static_cast<Eigen::Index>(points_));
        drho = -(cheb_.diff * rho.cwiseProduct(u[i]));
      }
      const double sign = i == 0 ? 1.0 : -1.0;
      Eigen::VectorXd force = -rho.cwiseProduct(u[i]).cwiseProduct(ux[i]) + sign * params_.a * (u[1] - u[0]);
      Eigen::VectorXd pressure(rho.size());
      for (Eigen::Index j = 0; j < rho.size(); ++j) pressure[j] = params_.K[i] * std::pow(rho[j], params_.gamma[i]);

      Eigen::VectorXd rhs = sine_ * w.cwiseProduct(force) + dsine_ * w.cwiseProduct(pressure);
      for (int l = 0; l < modes_; ++l) {
        const double k2 = ((l + 1) * pi) * ((l + 1) * pi);
        for (int j = 0; j < 2; ++j) rhs[l] -= params_.mu[i][j] * 0.5 * k2 * coefficients(y, j)[l];
      }
      const Eigen::MatrixXd mass = sine_ * w.cwiseProduct(rho).asDiagonal() * sine_.transpose();
      Eigen::LLT<Eigen::MatrixXd> llt(mass);
      if (llt.info() != Eigen::Success) throw Error(ErrorCode::IntegratorFailure, "Galerkin mass matrix is not positive definite");
      Eigen::Map<Eigen::VectorXd> dc(dydt.data() + 2 * points_ + i * modes_, modes_);
      dc = llt.solve(rhs);
    }
  }

  double velocity(const OdeState& y, int i, double x) const {
    double v = 0.0;
    const auto c = coefficients(y, i);
    for (int l = 0; l < modes_; ++l) v += c[l] * std::sin((l + 1) * pi * x);
    return v;
  }

 private:
  MixtureParams params_;
  int modes_;
  std::size_t points_;
  bool freeze_;
  ChebyshevGrid cheb_;
  Eigen::MatrixXd sine_, dsine_;
};

using CoefficientInit = std::function<double(int component, int mode)>;

GalerkinResult solve(const std::function<double(int, double)>& rho0, const CoefficientInit& coeff0,
                     const MixtureParams& params, int modes, double t_end, int cells,
                     const GalerkinOptions& options) {
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "Galerkin needs at least one mode");
  if (!(t_end > 0.0) || options.levels < 2) throw Error(ErrorCode::InvalidArgument, "invalid Galerkin horizon");
  const int N = options.collocation > 0 ? options.collocation : std::max(4 * modes, 48);
  const GalerkinSystem system(params, modes, N, options.freeze_density);
  const ChebyshevGrid& cheb = system.grid();

  OdeState y(system.size());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j <= N; ++j) y[i * (N + 1) + j] = rho0(i, cheb.x[j]);
    for (int l = 0; l < modes; ++l) y[2 * (N + 1) + i * modes + l] = coeff0(i, l);
  }

  std::vector<double> times(options.levels);
  for (int n = 0; n < options.levels; ++n) times[n] = t_end * n / (options.levels - 1);
  times.back() = t_end;

  const Grid grid = Grid::uniform(cells);
  GalerkinResult result;
  auto observer = [&](const OdeState& state, double t) {
    State s;
    s.t = t;
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd rho = system.density(state, i);
      if (!(rho.minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "positivity loss at t=" << t << " in density rho" << (i + 1);
        throw Error(ErrorCode::PositivityLoss, msg.str());
      }
      s.rho[i].resize(grid.size());
      s.u[i].resize(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        s.rho[i][k] = cheb.interpolate(rho, grid.nodes[k]);
        s.u[i][k] = system.velocity(state, i, grid.nodes[k]);
      }
      s.u[i].front() = 0.0;
      s.u[i].back() = 0.0;
    }
    std::array<Field, 2> coeffs;
    for (int i = 0; i < 2; ++i) {
      const auto c = system.coefficients(state, i);
      coeffs[i].assign(c.data(), c.data() + c.size());
    }
    result.trajectory.states.push_back(std::move(s));
    result.coefficients.push_back(std::move(coeffs));
  };

  try {
    auto stepper = odeint::make_dense_output(options.tolerance, options.tolerance,
                                             odeint::runge_kutta_dopri5<OdeState>());
    odeint::integrate_times(stepper, std::cref(system), y, times.begin(), times.end(), t_end * 1e-4,
                            observer, odeint::max_step_checker(static_cast<int>(options.max_steps)));
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorCode::IntegratorFailure, std::string("Galerkin integrator failed: ") + e.what());
  }
  for (std::size_t n = 1; n < result.trajectory.states.size(); ++n) {
    StepRecord rec;
    rec.step = static_cast<long>(n);
    rec.t = result.trajectory.states[n].t;
    rec.dt = rec.t - result.trajectory.states[n - 1].t;
    result.trajectory.step_log.push_back(rec);
  }
  return result;
}

}  // namespace

GalerkinResult galerkin_solve(const InitialData& initial, const MixtureParams& params, int modes, double t_end,
                              const GalerkinOptions& options) {
  // Velocity projection by Clenshaw-Curtis quadrature on a fine Chebyshev grid.
  const ChebyshevGrid fine(std::max(8 * modes, 256));
  auto coeff0 = [&](int i, int l) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < fine.x.size(); ++j) {
      sum += fine.quad[j] * initial.u0[i](fine.x[j]) * std::sin((l + 1) * pi * fine.x[j]);
    }
    return 2.0 * sum;
  };
  auto rho0 = [&](int i, double x) { return initial.rho0[i](x); };
  return solve(rho0, coeff0, params, modes, t_end, options.grid_cells > 0 ? options.grid_cells : 64, options);
}

GalerkinResult galerkin_solve(const State& initial, const MixtureParams& params, int modes, double t_end,
                              const GalerkinOptions& options) {
  const double h = initial.spacing();
  auto coeff0 = [&](int i, int l) {
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < initial.size(); ++k) {
      sum += initial.u[i][k] * std::sin((l + 1) * pi * static_cast<double>(k) * h);
    }
    return 2.0 * h * sum;
  };
  auto rho0 = [&](int i, double x) { return interpolate(initial.rho[i], h, x); };
  const int cells = options.grid_cells > 0 ? options.grid_cells : initial.cells();
  return solve(rho0, coeff0, params, modes, t_end, cells, options);
}

double l2_distance(const State& a, const State& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "states must share a grid");
  Field diff(a.size());
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < a.size(); ++k) diff[k] = (a.rho[i][k] - b.rho[i][k]) * (a.rho[i][k] - b.rho[i][k]);
    total += trapezoid(diff, a.spacing());
    for (std::size_t k = 0; k < a.size(); ++k) diff[k] = (a.u[i][k] - b.u[i][k]) * (a.u[i][k] - b.u[i][k]);
    total += trapezoid(diff, a.spacing());
  }
  return std::sqrt(total);
}

}  // namespace bifluid
