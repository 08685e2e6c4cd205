import math

import numpy as np
import pytest

import bifluid


def params(mu21=0.5):
    p = bifluid.MixtureParams()
    p.mu = [[1.0, 0.0], [mu21, 1.0]]
    return bifluid.validate_params(p)


def test_m0_of_triangular_matrix():
    assert bifluid.compute_M0([[2.0, 0.0], [1.0, 2.0]]) == pytest.approx(1.5, rel=1e-15)
    assert params().M0 == pytest.approx(0.75)


def test_invalid_params_raise():
    p = bifluid.MixtureParams()
    p.gamma = [1.0, 2.0]
    with pytest.raises(bifluid.Error, match="adiabatic exponent must exceed 1"):
        bifluid.validate_params(p)


def test_equilibrium_is_a_fixed_point():
    s = bifluid.initial_state("equilibrium", 32)
    nxt = bifluid.step(s, params(), 1e-3)
    assert nxt.rho[0].tolist() == s.rho[0].tolist()
    assert np.all(nxt.u[1] == 0.0)


def test_run_conserves_mass_and_energy_bound():
    p = params()
    s = bifluid.initial_state("smooth", 64)
    ctl = bifluid.StepControl()
    ctl.t_end = 0.2
    traj = bifluid.run(s, p, ctl)
    h = 1.0 / 64
    for i in range(2):
        m0 = bifluid.total_mass(traj.states[0].rho[i], h)
        m1 = bifluid.total_mass(traj.states[-1].rho[i], h)
        assert abs(m1 - m0) <= 1e-12 * m0
    assert traj.times[-1] == pytest.approx(0.2)
    assert bifluid.energy_violation(traj, p) <= 1e-12
    report = bifluid.estimate_report(traj, p)
    assert all(e["pass"] for e in report)
    assert {e["name"] for e in report} >= {"energy_inequality", "rho1_inf"}


def test_state_from_arrays_and_callables():
    x = bifluid.Grid(16).nodes
    s = bifluid.State([np.ones_like(x), 2 * np.ones_like(x)], [np.zeros_like(x), np.zeros_like(x)])
    assert len(s) == 17
    # K/(gamma-1) rho^gamma with K = 1, gamma = 2: 1 + 4.
    assert bifluid.energy(s, params()) == pytest.approx(5.0)
    t = bifluid.sample(lambda x: 1.0, lambda x: 2.0, lambda x: 0.0, lambda x: 0.0, 16)
    assert t == s


def test_sequential_and_block_solves_agree():
    p = params()
    s = bifluid.initial_state("smooth", 64)
    seq, block = bifluid.SchemeOptions(), bifluid.SchemeOptions()
    seq.viscous = bifluid.ViscousSolve.sequential
    block.viscous = bifluid.ViscousSolve.block
    dt = bifluid.stable_dt(s, p)
    a, b = bifluid.step(s, p, dt, seq), bifluid.step(s, p, dt, block)
    for i in range(2):
        assert np.max(np.abs(a.u[i] - b.u[i])) <= 1e-10


def test_vacuum_raises():
    s = bifluid.initial_state("vacuum", 64)
    with pytest.raises(bifluid.Error, match="vacuum-degenerate at t="):
        bifluid.run(s, bifluid.validate_params(bifluid.MixtureParams()))


def test_mms_convergence_is_first_order():
    r = bifluid.mms_convergence(params(), [32, 64])
    assert len(r["rows"]) == 2
    assert r["rows"][1]["errors"][0] < r["rows"][0]["errors"][0]


def test_heat_mode():
    exact = bifluid.heat_mode_exact([[1.0, 0.0], [0.5, 1.0]], 0.1)
    assert exact[0] == pytest.approx(math.exp(-math.pi**2 * 0.1))
    assert bifluid.galerkin_heat_error(params()) < 1e-6


def test_uniqueness_identical_data():
    r = bifluid.uniqueness_experiment("equilibrium", [0.0, 1e-3], params(), cells=32, t_end=0.05)
    assert r["rows"][0]["sup_total"] == 0.0
    assert r["rows"][1]["gronwall_pass"]


def test_lagrangian_report():
    p = params()
    ctl = bifluid.StepControl()
    ctl.t_end = 0.1
    ctl.stride = 5
    traj = bifluid.run(bifluid.initial_state("smooth", 64), p, ctl)
    assert all(e["pass"] for e in bifluid.lagrangian_report(traj, p))


def test_run_command(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = equilibrium\nt_end = 0.05\nn = 16\n")
    out = tmp_path / "out"
    assert bifluid.run_command("simulate", str(cfg), str(out)) == 0
    assert (out / "estimates.csv").exists()
    cfg.write_text("preset = smooth\ngamma1 = 1\n")
    assert bifluid.run_command("simulate", str(cfg), str(out)) == 2
