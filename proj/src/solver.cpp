#include "bifluid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bifluid {

namespace {

double convection(const Field& u, std::size_t k, double h, Convection scheme) {
  const double uk = u[k];
  if (scheme == Convection::Central) return uk * (u[k + 1] - u[k - 1]) / (2.0 * h);
  if (uk > 0.0) return uk * (u[k] - u[k - 1]) / h;
  return uk * (u[k + 1] - u[k]) / h;
}

// Conservative donor-cell update on the dual cells of the nodal grid. Node k
// owns [x_k - h/2, x_k + h/2] clipped to [0,1], so the boundary cells have
// half width and the update conserves the trapezoidal mass exactly.
Field continuity_update(const Field& rho, const Field& u, double h, double dt,
                        Convection scheme) {
  const std::size_t size = rho.size();
  Field flux(size - 1);
  for (std::size_t k = 0; k + 1 < size; ++k) {
    const double face_u = 0.5 * (u[k] + u[k + 1]);
    double face_rho;
    if (scheme == Convection::Central) {
      face_rho = 0.5 * (rho[k] + rho[k + 1]);
    } else {
      face_rho = face_u > 0.0 ? rho[k] : rho[k + 1];
    }
    flux[k] = face_rho * face_u;
  }
  Field out(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double right = k + 1 < size ? flux[k] : 0.0;
    const double left = k > 0 ? flux[k - 1] : 0.0;
    const double width = (k == 0 || k + 1 == size) ? 0.5 * h : h;
    out[k] = rho[k] - dt / width * (right - left);
  }
  return out;
}

[[noreturn]] void throw_vacuum(double t, int component, std::size_t node, double value) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "vacuum-degenerate at t=" << t << ": rho" << (component + 1) << " = " << value
      << " at node " << node;
  throw Error(ErrorCode::VacuumDegenerate, msg.str());
}

bool any_nonzero(const Field& f) {
  return std::any_of(f.begin(), f.end(), [](double v) { return v != 0.0; });
}

}  // namespace

namespace detail {

CoupledSystem assemble(const State& state, const MixtureParams& params, double dt,
                       const SchemeOptions& options) {
  const std::size_t size = state.size();
  const std::size_t m = size - 1 - 1;
  const double h = state.spacing();
  const double h2 = h * h;
  const double t_new = state.t + dt;
  const SourceTerms* sources = options.sources.get();

  CoupledSystem sys;
  for (int i = 0; i < 2; ++i) {
    sys.rho[i] = continuity_update(state.rho[i], state.u[i], h, dt, options.convection);
    if (sources && sources->continuity) {
      for (std::size_t k = 0; k < size; ++k) {
        sys.rho[i][k] += dt * sources->continuity(i, static_cast<double>(k) * h, state.t);
      }
    }
    for (std::size_t k = 0; k < size; ++k) {
      const double r = sys.rho[i][k];
      if (!std::isfinite(r) || !(r > options.density_floor)) throw_vacuum(t_new, i, k, r);
    }
    for (int j = 0; j < 2; ++j) {
      sys.lower[i][j].assign(m, 0.0);
      sys.diag[i][j].assign(m, 0.0);
      sys.upper[i][j].assign(m, 0.0);
    }
    sys.rhs[i].assign(m, 0.0);
  }

  const double drag_diag = options.drag_implicit ? params.a : 0.0;
  for (int i = 0; i < 2; ++i) {
    const Field& rho = sys.rho[i];
    const Field& u = state.u[i];
    Field pressure(size);
    for (std::size_t k = 0; k < size; ++k) pressure[k] = params.K[i] * std::pow(rho[k], params.gamma[i]);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t k = r + 1;
      for (int j = 0; j < 2; ++j) {
        const double mu = params.mu[i][j];
        sys.lower[i][j][r] = -mu / h2;
        sys.upper[i][j][r] = -mu / h2;
        sys.diag[i][j][r] = 2.0 * mu / h2;
      }
      sys.diag[i][i][r] += rho[k] / dt + drag_diag;

      double rhs = rho[k] * u[k] / dt - rho[k] * convection(u, k, h, options.convection) -
                   (pressure[k + 1] - pressure[k - 1]) / (2.0 * h);
      const double u1 = state.u[0][k];
      const double u2 = state.u[1][k];
      if (i == 0) {
        // u2 enters the component-1 drag at the old level.
        rhs += options.drag_implicit ? params.a * u2 : params.a * (u2 - u1);
      } else if (options.drag_implicit) {
        // Component-2 drag uses the freshly computed u1.
        sys.diag[1][0][r] -= params.a;
      } else {
        rhs -= params.a * (u2 - u1);
      }
      if (sources && sources->momentum) rhs += sources->momentum(i, static_cast<double>(k) * h, t_new);
      sys.rhs[i][r] = rhs;
    }
  }
  return sys;
}

Field solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                        std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t m = diag.size();
  Field c(m), d(m);
  double scale = 0.0;
  for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(diag[r]));
  const double tiny = 1e-14 * std::max(scale, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double pivot = r == 0 ? diag[0] : diag[r] - lower[r] * c[r - 1];
    if (!std::isfinite(pivot) || std::abs(pivot) < tiny) {
      throw Error(ErrorCode::SingularSystem, "singular tridiagonal system (time step too large?)");
    }
    c[r] = upper[r] / pivot;
    d[r] = (r == 0 ? rhs[0] : rhs[r] - lower[r] * d[r - 1]) / pivot;
  }
  Field x(m);
  x[m - 1] = d[m - 1];
  for (std::size_t r = m - 1; r-- > 0;) x[r] = d[r] - c[r] * x[r + 1];
  return x;
}

namespace {

struct Block {
  double a00, a01, a10, a11;
};

Block block_at(const std::array<std::array<Field, 2>, 2>& band, std::size_t r) {
  return {band[0][0][r], band[0][1][r], band[1][0][r], band[1][1][r]};
}

Block mul(const Block& x, const Block& y) {
  return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
          x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
}

std::array<double, 2> mul(const Block& x, const std::array<double, 2>& v) {
  return {x.a00 * v[0] + x.a01 * v[1], x.a10 * v[0] + x.a11 * v[1]};
}

Block inverse(const Block& x, double tiny) {
  const double det = x.a00 * x.a11 - x.a01 * x.a10;
  if (!std::isfinite(det) || std::abs(det) < tiny) {
    throw Error(ErrorCode::SingularSystem, "singular block tridiagonal system (time step too large?)");
  }
  return {x.a11 / det, -x.a01 / det, -x.a10 / det, x.a00 / det};
}

}  // namespace

std::array<Field, 2> solve_block_tridiagonal(const CoupledSystem& sys) {
  const std::size_t m = sys.rhs[0].size();
  std::vector<Block> c(m);
  std::vector<std::array<double, 2>> d(m);
  double scale = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    scale = std::max({scale, std::abs(sys.diag[0][0][r]), std::abs(sys.diag[1][1][r])});
  }
  const double tiny = 1e-28 * scale * scale;
  for (std::size_t r = 0; r < m; ++r) {
    Block pivot = block_at(sys.diag, r);
    std::array<double, 2> rhs{sys.rhs[0][r], sys.rhs[1][r]};
    if (r > 0) {
      const Block lower = block_at(sys.lower, r);
      const Block lc = mul(lower, c[r - 1]);
      pivot = {pivot.a00 - lc.a00, pivot.a01 - lc.a01, pivot.a10 - lc.a10, pivot.a11 - lc.a11};
      const auto ld = mul(lower, d[r - 1]);
      rhs = {rhs[0] - ld[0], rhs[1] - ld[1]};
    }
    const Block inv = inverse(pivot, tiny);
    c[r] = mul(inv, block_at(sys.upper, r));
    d[r] = mul(inv, rhs);
  }
  std::array<Field, 2> x{Field(m), Field(m)};
  std::array<double, 2> next = d[m - 1];
  x[0][m - 1] = next[0];
  x[1][m - 1] = next[1];
  for (std::size_t r = m - 1; r-- > 0;) {
    const auto cx = mul(c[r], next);
    next = {d[r][0] - cx[0], d[r][1] - cx[1]};
    x[0][r] = next[0];
    x[1][r] = next[1];
  }
  return x;
}

std::array<Field, 2> solve_sequential(const CoupledSystem& sys) {
  if (any_nonzero(sys.diag[0][1]) || any_nonzero(sys.lower[0][1]) || any_nonzero(sys.upper[0][1])) {
    throw Error(ErrorCode::InvalidArgument, "sequential viscous solve requires mu12 == 0");
  }
  std::array<Field, 2> x;
  x[0] = solve_tridiagonal(sys.lower[0][0], sys.diag[0][0], sys.upper[0][0], sys.rhs[0]);
  const std::size_t m = x[0].size();
  Field rhs2 = sys.rhs[1];
  for (std::size_t r = 0; r < m; ++r) {
    double known = sys.diag[1][0][r] * x[0][r];
    if (r > 0) known += sys.lower[1][0][r] * x[0][r - 1];
    if (r + 1 < m) known += sys.upper[1][0][r] * x[0][r + 1];
    rhs2[r] -= known;
  }
  x[1] = solve_tridiagonal(sys.lower[1][1], sys.diag[1][1], sys.upper[1][1], rhs2);
  return x;
}

double system_residual(const CoupledSystem& sys, const std::array<Field, 2>& x) {
  const std::size_t m = x[0].size();
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t r = 0; r < m; ++r) {
      double lhs = 0.0;
      for (int j = 0; j < 2; ++j) {
        lhs += sys.diag[i][j][r] * x[j][r];
        if (r > 0) lhs += sys.lower[i][j][r] * x[j][r - 1];
        if (r + 1 < m) lhs += sys.upper[i][j][r] * x[j][r + 1];
      }
      worst = std::max(worst, std::abs(lhs - sys.rhs[i][r]));
    }
  }
  return worst;
}

}  // namespace detail

State step(const State& state, const MixtureParams& params, double dt,
           const SchemeOptions& options, StepRecord* record) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const detail::CoupledSystem sys = detail::assemble(state, params, dt, options);

  ViscousSolve mode = options.viscous;
  if (mode == ViscousSolve::Automatic) {
    mode = params.mu[0][1] == 0.0 ? ViscousSolve::Sequential : ViscousSolve::Block;
  }
  const std::array<Field, 2> interior =
      mode == ViscousSolve::Sequential ? detail::solve_sequential(sys) : detail::solve_block_tridiagonal(sys);

  State next;
  next.t = state.t + dt;
  next.rho = sys.rho;
  for (int i = 0; i < 2; ++i) {
    next.u[i].assign(state.size(), 0.0);
    std::copy(interior[i].begin(), interior[i].end(), next.u[i].begin() + 1);
    for (double v : interior[i]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::SingularSystem, "velocity solve produced non-finite values");
    }
  }
  if (record) {
    const double h = state.spacing();
    double speed = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (double v : state.u[i]) speed = std::max(speed, std::abs(v));
    }
    record->t = next.t;
    record->dt = dt;
    record->cfl = speed * dt / h;
    record->residual = detail::system_residual(sys, interior);
  }
  return next;
}

double stable_dt(const State& state, const MixtureParams& params, const StepControl& ctl,
                 const Grid& grid) {
  double speed = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < state.size(); ++k) {
      speed = std::max(speed, std::abs(state.u[i][k]));
      if (params.K[i] > 0.0) {
        const double c2 = params.K[i] * params.gamma[i] * std::pow(state.rho[i][k], params.gamma[i] - 1.0);
        speed = std::max(speed, std::sqrt(c2));
      }
    }
  }
  if (!(speed > 0.0)) return ctl.dt_max;
  return std::min(ctl.dt_max, ctl.cfl_safety * grid.h / speed);
}

Trajectory run(const State& initial, const MixtureParams& params, const StepControl& ctl,
               const Grid& grid, const std::vector<Monitor>& monitors) {
  if (!(ctl.cfl_safety > 0.0 && ctl.cfl_safety <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "cfl_safety must lie in (0, 1]");
  }
  if (!(ctl.dt_max > 0.0) || !(ctl.t_end > 0.0) || ctl.fixed_dt < 0.0 || ctl.stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "invalid step control");
  }
  if (initial.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "state does not match grid");
  check_state(initial, ctl.scheme.density_floor);

  Trajectory traj;
  traj.states.push_back(initial);
  StepRecord first;
  first.t = initial.t;
  for (const auto& monitor : monitors) monitor(initial, first);

  State current = initial;
  long count = 0;
  // Steps shorter than this fraction of t_end are merged into the previous one.
  const double merge = 1e-10 * ctl.t_end;
  while (current.t < ctl.t_end - merge) {
    double dt = ctl.fixed_dt > 0.0 ? ctl.fixed_dt : stable_dt(current, params, ctl, grid);
    const bool last = current.t + dt >= ctl.t_end - merge;
    if (last) dt = ctl.t_end - current.t;

    StepRecord rec;
    try {
      current = step(current, params, dt, ctl.scheme, &rec);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << e.what() << " (step " << (count + 1) << " from t=" << current.t << ")";
      throw Error(e.code(), msg.str());
    }
    ++count;
    if (last) current.t = ctl.t_end;
    rec.step = count;
    rec.t = current.t;
    traj.step_log.push_back(rec);
    for (const auto& monitor : monitors) monitor(current, rec);
    if (last || count % ctl.stride == 0) traj.states.push_back(current);
  }
  return traj;
}

}  // namespace bifluid
