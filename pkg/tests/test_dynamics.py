import numpy as np
import pytest
from scipy.integrate import solve_ivp

from adiabatic_pathways import dynamics, hamiltonians as ham, qcore, schedules


def ode_final_state(p, u1, u2, T):
    """Independent reference: adaptive RK integration of i dpsi/dt = H(t/T) psi."""

    def rhs(t, y):
        s = t / T
        return -1j * (u1(s) * p.H_I + u2(s) * p.H_P) @ y

    sol = solve_ivp(rhs, (0, T), p.initial_state.astype(complex), method="DOP853", rtol=1e-12, atol=1e-12)
    return sol.y[:, -1]


def ode_F1(p, u1, u2, T):
    return abs(np.vdot(p.target_state, ode_final_state(p, u1, u2, T))) ** 2


def test_frozen_eigenstate(lz, frozen_lz_schedule):
    traj = dynamics.propagate(lz, frozen_lz_schedule, 7.3)
    overlaps = np.abs(traj.states @ np.array([0, 1]).conj())
    np.testing.assert_allclose(overlaps, 1.0, atol=1e-12)
    rep = dynamics.objective(lz, frozen_lz_schedule, 7.3, 0.4)
    np.testing.assert_allclose(rep.P0_trace, 1.0, atol=1e-10)
    assert rep.F2 == pytest.approx(1.0, abs=1e-12)


def test_adiabatic_limit(lz):
    rep = dynamics.objective(lz, schedules.linear(100), 100.0, 0.1)
    assert rep.F1 > 0.999
    assert rep.P0_trace.min() > 0.99


@pytest.mark.parametrize("problem, T", [(ham.grover(2), 3.0), (ham.landau_zener(), 3.0)])
def test_linear_matches_ode_reference(problem, T):
    f1 = dynamics.objective(problem, schedules.linear(100), T, 0.0).F1
    ref = ode_F1(problem, lambda s: 1 - s, lambda s: s, T)
    assert 0 < f1 < 1
    assert abs(f1 - ref) < 1e-4


def test_fine_grid_self_convergence():
    p = ham.grover(2)
    f_ref = dynamics.objective(p, schedules.linear(10000), 3.0, 0.0, traces=False).F1
    f = dynamics.objective(p, schedules.linear(100), 3.0, 0.0, traces=False).F1
    assert abs(f - f_ref) < 1e-4


def test_fidelity_extremes(lz):
    traj = dynamics.Trajectory(np.array([lz.initial_state, lz.target_state]), 1.0)
    assert dynamics.fidelity_F1(traj, lz) == pytest.approx(1.0)
    orth = np.array([lz.target_state[1].conj(), -lz.target_state[0].conj()])
    traj = dynamics.Trajectory(np.array([lz.initial_state, orth]), 1.0)
    assert dynamics.fidelity_F1(traj, lz) == pytest.approx(0.0, abs=1e-15)


def test_norm_conservation_and_time_reversal(rng):
    p = ham.grover(3, 5)
    sch = schedules.crab_schedule(schedules.CrabParams(rng.uniform(-1, 1, 12)), M=60)
    traj = dynamics.propagate(p, sch, 4.2)
    assert traj.norm_drift() < 1e-9
    spec = traj.spectra
    psi = traj.final
    for k in range(sch.M - 1, -1, -1):
        v = spec.vectors[k]
        psi = v @ (spec.phases[k].conj() * (v.conj().T @ psi))
    assert np.max(np.abs(psi - p.initial_state)) < 1e-8


def test_propagation_matches_step_unitary(lz):
    sch = schedules.roland_cerf(2, 10)
    traj = dynamics.propagate(lz, sch, 2.0)
    m1, m2 = sch.midpoints()
    psi = lz.initial_state
    for k in range(10):
        psi = qcore.apply(qcore.step_unitary(ham.hamiltonian_at(lz, m1[k], m2[k]), 0.2), psi)
        np.testing.assert_allclose(traj.states[k + 1], psi, atol=1e-13)


def test_objective_identities(lz):
    sch = schedules.linear(100)
    rep = dynamics.objective(lz, sch, 3.0, 0.37)
    assert rep.F == rep.F1 + 0.37 * rep.F2
    assert rep.P0_trace[0] == pytest.approx(1.0, abs=1e-12)
    assert abs(rep.P0_trace[-1] - rep.F1) < 1e-12
    assert np.all(rep.P0_trace <= 1 + 1e-10) and np.all(rep.P0_trace >= 0)
    zero = dynamics.objective(lz, sch, 3.0, 0.0)
    assert zero.F == zero.F1


def test_energy_F2_trapezoid(lz):
    sch = schedules.linear(50)
    traj = dynamics.propagate(lz, sch, 2.5)
    e = [qcore.expectation(ham.hamiltonian_at(lz, a, b), psi) for a, b, psi in zip(sch.u1, sch.u2, traj.states)]
    t = np.linspace(0, 2.5, 51)
    ref = -np.trapezoid(e, t) / 2.5
    assert dynamics.energy_F2(traj, lz, sch, 2.5) == pytest.approx(ref, abs=1e-14)


def test_F2_on_instantaneous_ground_state():
    # for an exact eigenstate trace, F2 is minus the time-averaged ground energy
    p = ham.grover(2)
    sch = schedules.linear(40)
    states = np.array([ham.gap_and_ground(ham.hamiltonian_at(p, a, b)).ground_state for a, b in zip(sch.u1, sch.u2)])
    e0 = np.array([qcore.eigh(ham.hamiltonian_at(p, a, b)).eigenvalues[0] for a, b in zip(sch.u1, sch.u2)])
    f2 = dynamics.energy_F2(dynamics.Trajectory(states, 1.0), p, sch)
    assert f2 == pytest.approx(-np.dot(dynamics.trapezoid_weights(40), e0) / 40, abs=1e-14)
    assert f2 <= 0


@pytest.mark.parametrize(
    "alpha, f1, f2, f",
    [(1.0, 0.9938, 0.9193, 1.9131), (0.2, 0.9992, 0.9071, 1.1806), (1.0, 0.9119, 0.7568, 1.6688)],
)
def test_weighted_sum_sign_convention(alpha, f1, f2, f):
    assert abs(f1 + alpha * f2 - f) < 1e-4


def test_gap_trace_landau_zener(lz):
    g = dynamics.gap_trace(lz, schedules.linear(100))
    assert g[0] == pytest.approx(2.0)
    assert g[50] == pytest.approx(np.sqrt(2), abs=1e-14)


def test_gap_trace_grover_minimum():
    g = dynamics.gap_trace(ham.grover(4), schedules.linear(100))
    assert g.min() == pytest.approx(0.25, abs=1e-10)


def test_ground_population_degenerate_subspace():
    # u1 = u2 = 0 in the interior makes H = 0: P0 must count the whole space
    p = ham.grover(2)
    u1 = np.array([1.0, 0.0, 0.0])
    u2 = np.array([0.0, 0.0, 1.0])
    sch = schedules.Schedule(u1, u2)
    rep = dynamics.objective(p, sch, 1.0, 0.1)
    assert rep.P0_trace[1] == pytest.approx(1.0, abs=1e-12)


def test_trace_csv(tmp_path, lz):
    sch = schedules.linear(10)
    rep = dynamics.objective(lz, sch, 3.0, 0.1)
    path = tmp_path / "trace.csv"
    dynamics.write_trace_csv(rep, sch, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "s,P0,gap,energy_expectation"
    assert len(lines) == 12


def test_rejects_non_positive_duration(lz):
    with pytest.raises(qcore.ValidationError):
        dynamics.propagate(lz, schedules.linear(10), 0.0)
