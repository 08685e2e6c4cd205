#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "bifluid/commands.hpp"
#include "bifluid/config.hpp"
#include "bifluid/diagnostics.hpp"
#include "bifluid/lagrangian.hpp"
#include "bifluid/verification.hpp"

namespace py = pybind11;
using namespace bifluid;

namespace {

py::array_t<double> to_array(const Field& f) { return py::array_t<double>(f.size(), f.data()); }

Field to_field(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return Field(a.data(), a.data() + a.size());
}

// Field pair accessor: state.rho is a tuple of two arrays.
py::tuple pair(const std::array<Field, 2>& f) { return py::make_tuple(to_array(f[0]), to_array(f[1])); }

State make_state(const py::sequence& rho, const py::sequence& u, double t) {
  if (rho.size() != 2 || u.size() != 2) throw py::value_error("expected two densities and two velocities");
  State s;
  s.t = t;
  for (int i = 0; i < 2; ++i) {
    s.rho[i] = to_field(rho[i].cast<py::array_t<double>>());
    s.u[i] = to_field(u[i].cast<py::array_t<double>>());
  }
  return s;
}

py::dict entry_dict(const EstimateEntry& e) {
  py::dict d;
  d["name"] = e.name;
  d["bound"] = e.bound ? py::cast(*e.bound) : py::none();
  d["observed"] = e.observed;
  d["slack"] = e.slack ? py::cast(*e.slack) : py::none();
  d["tolerance"] = e.tolerance;
  d["pass"] = e.pass;
  d["note"] = e.note;
  return d;
}

py::list entries(const std::vector<EstimateEntry>& list) {
  py::list out;
  for (const auto& e : list) out.append(entry_dict(e));
  return out;
}

}  // namespace

PYBIND11_MODULE(_bifluid, m) {
  m.doc() = "One-dimensional viscous compressible two-fluid mixture solver.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::enum_<Convection>(m, "Convection").value("upwind", Convection::Upwind).value("central", Convection::Central);
  py::enum_<ViscousSolve>(m, "ViscousSolve")
      .value("automatic", ViscousSolve::Automatic)
      .value("sequential", ViscousSolve::Sequential)
      .value("block", ViscousSolve::Block);

  py::class_<MixtureParams>(m, "MixtureParams")
      .def(py::init<>())
      .def_readwrite("a", &MixtureParams::a)
      .def_readwrite("K", &MixtureParams::K)
      .def_readwrite("gamma", &MixtureParams::gamma)
      .def_readwrite("mu", &MixtureParams::mu)
      .def_readwrite("triangular_enforced", &MixtureParams::triangular_enforced)
      .def_readonly("M0", &MixtureParams::M0)
      .def_readonly("non_triangular", &MixtureParams::non_triangular)
      .def("validated", [](const MixtureParams& p) { return validate_params(p); });

  py::class_<Grid>(m, "Grid")
      .def(py::init(&Grid::uniform), py::arg("cells"))
      .def_readonly("n", &Grid::n)
      .def_readonly("h", &Grid::h)
      .def_property_readonly("nodes", [](const Grid& g) { return to_array(g.nodes); });

  py::class_<State>(m, "State")
      .def(py::init(&make_state), py::arg("rho"), py::arg("u"), py::arg("t") = 0.0)
      .def_readwrite("t", &State::t)
      .def_property_readonly("rho", [](const State& s) { return pair(s.rho); })
      .def_property_readonly("u", [](const State& s) { return pair(s.u); })
      .def("__len__", &State::size)
      .def(py::self == py::self);

  py::class_<SchemeOptions>(m, "SchemeOptions")
      .def(py::init<>())
      .def_readwrite("convection", &SchemeOptions::convection)
      .def_readwrite("viscous", &SchemeOptions::viscous)
      .def_readwrite("drag_implicit", &SchemeOptions::drag_implicit)
      .def_readwrite("density_floor", &SchemeOptions::density_floor);

  py::class_<StepControl>(m, "StepControl")
      .def(py::init<>())
      .def_readwrite("cfl_safety", &StepControl::cfl_safety)
      .def_readwrite("dt_max", &StepControl::dt_max)
      .def_readwrite("t_end", &StepControl::t_end)
      .def_readwrite("fixed_dt", &StepControl::fixed_dt)
      .def_readwrite("stride", &StepControl::stride)
      .def_readwrite("scheme", &StepControl::scheme);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_property_readonly("times", [](const Trajectory& t) {
        Field out;
        for (const auto& s : t.states) out.push_back(s.t);
        return to_array(out);
      })
      .def_property_readonly("step_count", [](const Trajectory& t) { return t.step_log.size(); });

  m.def("compute_M0", &compute_M0, py::arg("mu"));
  m.def("validate_params", &validate_params, py::arg("params"));
  m.def("preset_names", &preset_names);
  m.def(
      "initial_state",
      [](const std::string& name, int cells) {
        return sample_initial(build_initial(preset(name)), Grid::uniform(cells));
      },
      py::arg("preset"), py::arg("cells"));
  m.def(
      "sample",
      [](const Profile& rho1, const Profile& rho2, const Profile& u1, const Profile& u2, int cells) {
        InitialData d;
        d.rho0 = {rho1, rho2};
        d.u0 = {u1, u2};
        return sample_initial(d, Grid::uniform(cells));
      },
      py::arg("rho1"), py::arg("rho2"), py::arg("u1"), py::arg("u2"), py::arg("cells"));

  m.def(
      "step", [](const State& s, const MixtureParams& p, double dt, const SchemeOptions& o) { return step(s, p, dt, o); },
      py::arg("state"), py::arg("params"), py::arg("dt"), py::arg("options") = SchemeOptions{});
  m.def(
      "stable_dt",
      [](const State& s, const MixtureParams& p, const StepControl& c) {
        return stable_dt(s, p, c, Grid::uniform(s.cells()));
      },
      py::arg("state"), py::arg("params"), py::arg("control") = StepControl{});
  m.def(
      "run",
      [](const State& s, const MixtureParams& p, const StepControl& c) {
        py::gil_scoped_release release;
        return run(s, p, c, Grid::uniform(s.cells()));
      },
      py::arg("initial"), py::arg("params"), py::arg("control") = StepControl{});

  m.def("energy", &energy, py::arg("state"), py::arg("params"));
  m.def("dissipation", &dissipation, py::arg("state"), py::arg("params"));
  m.def("total_mass", [](const py::array_t<double>& rho, double h) { return total_mass(to_field(rho), h); },
        py::arg("rho"), py::arg("h"));
  m.def(
      "estimate_report",
      [](const Trajectory& traj, const MixtureParams& p, double tol_scale) {
        const auto samples = samples_from(traj, p);
        const State& first = traj.states.front();
        return entries(estimate_report(samples, p, b1(first, p), first.spacing(), tol_scale).entries);
      },
      py::arg("trajectory"), py::arg("params"), py::arg("tol_scale") = 2.0);
  m.def(
      "energy_violation",
      [](const Trajectory& traj, const MixtureParams& p) {
        return energy_violation(samples_from(traj, p), b1(traj.states.front(), p));
      },
      py::arg("trajectory"), py::arg("params"));
  m.def(
      "lagrangian_report",
      [](const Trajectory& traj, const MixtureParams& p, double constant) {
        return entries(lagrangian_report(traj.states, p, constant).entries);
      },
      py::arg("trajectory"), py::arg("params"), py::arg("constant") = 2.0);
  m.def("verify_transformed_energy",
        [](const State& s, const MixtureParams& p, int m) { return verify_transformed_energy(s, p, m); },
        py::arg("state"), py::arg("params"), py::arg("component"));

  m.def(
      "mms_convergence",
      [](const MixtureParams& p, const std::vector<int>& resolutions, double dt_factor) {
        MmsOptions o;
        o.dt_factor = dt_factor;
        MmsResult r;
        {
          py::gil_scoped_release release;
          r = mms_convergence(canonical_case(), p, resolutions, o);
        }
        py::dict d;
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict e;
          e["n"] = row.n;
          e["h"] = row.h;
          e["dt"] = row.dt;
          e["errors"] = row.errors;
          rows.append(e);
        }
        d["rows"] = rows;
        d["order"] = r.order;
        d["min_order"] = r.min_order;
        return d;
      },
      py::arg("params"), py::arg("resolutions") = std::vector<int>{64, 128, 256}, py::arg("dt_factor") = 0.1);

  m.def("heat_mode_exact", &heat_mode_exact, py::arg("mu"), py::arg("t"));
  m.def(
      "galerkin_heat_error",
      [](const MixtureParams& params, double horizon) {
        MixtureParams p = params;
        p.a = 0.0;
        p.K = {0.0, 0.0};
        InitialData d;
        d.rho0 = {[](double) { return 1.0; }, [](double) { return 1.0; }};
        d.u0 = {[](double x) { return std::sin(std::numbers::pi * x); }, [](double) { return 0.0; }};
        GalerkinOptions o;
        o.freeze_density = true;
        const GalerkinResult r = galerkin_solve(d, p, 1, horizon, o);
        double err = 0.0;
        for (std::size_t n = 0; n < r.coefficients.size(); ++n) {
          const auto exact = heat_mode_exact(p.mu, r.trajectory.states[n].t);
          err = std::max({err, std::abs(r.coefficients[n][0][0] - exact[0]), std::abs(r.coefficients[n][1][0] - exact[1])});
        }
        return err;
      },
      py::arg("params"), py::arg("horizon") = 0.1);
  m.def(
      "galerkin_solve",
      [](const State& s, const MixtureParams& p, int modes, double t_end) {
        py::gil_scoped_release release;
        return galerkin_solve(s, p, modes, t_end).trajectory;
      },
      py::arg("initial"), py::arg("params"), py::arg("modes"), py::arg("t_end"));
  m.def("l2_distance", &l2_distance, py::arg("a"), py::arg("b"));

  m.def(
      "uniqueness_experiment",
      [](const std::string& base, const std::vector<double>& eps, const MixtureParams& p, int cells, double t_end) {
        InitialData delta;
        delta.rho0 = {[](double) { return 0.0; }, [](double) { return 0.0; }};
        delta.u0 = {[](double x) { return std::sin(std::numbers::pi * x); }, [](double) { return 0.0; }};
        StepControl ctl;
        ctl.t_end = t_end;
        const UniquenessResult r = uniqueness_experiment(build_initial(preset(base)), delta, eps, p, ctl, Grid::uniform(cells));
        py::dict d;
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict e;
          e["eps"] = row.eps;
          e["sup_total"] = row.sup_total;
          e["sup_ratio"] = row.sup_ratio;
          e["gronwall_ratio"] = row.gronwall_ratio;
          e["gronwall_pass"] = row.gronwall_pass;
          rows.append(e);
        }
        d["rows"] = rows;
        d["spread"] = r.spread;
        d["h"] = r.h;
        d["dt"] = r.dt;
        return d;
      },
      py::arg("preset"), py::arg("eps"), py::arg("params"), py::arg("cells") = 64, py::arg("t_end") = 1.0);

  m.def(
      "run_command",
      [](const std::string& verb, const std::string& config, const std::string& out, bool quiet) {
        CommandContext ctx;
        ctx.out = out;
        ctx.quiet = quiet;
        return run_command(verb, config, ctx);
      },
      py::arg("verb"), py::arg("config"), py::arg("out") = "", py::arg("quiet") = true);
}
