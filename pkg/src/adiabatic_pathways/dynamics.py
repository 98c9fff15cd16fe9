"""Piecewise-constant propagation and the weighted fidelity/energy objective.

Slice k spans [t_k, t_{k+1}] with t_k = k T / M and uses the control
average of its two grid points. The energy term is a trapezoidal sum over
grid points with controls taken at the grid points themselves.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels, qcore
from .hamiltonians import DEGENERACY_TOL, AdiabaticProblem, hamiltonian_stack
from .qcore import ValidationError
from .schedules import Schedule


@dataclass(frozen=True, eq=False)
class SliceSpectra:
    """Eigen-factors of the M slice Hamiltonians."""

    dt: float
    energies: np.ndarray  # (M, N)
    vectors: np.ndarray  # (M, N, N)
    phases: np.ndarray  # (M, N), exp(-i E dt)


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray  # (M + 1, N)
    T: float
    spectra: SliceSpectra | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))


@dataclass(frozen=True, eq=False)
class ObjectiveReport:
    F: float
    F1: float
    F2: float
    alpha: float
    P0_trace: np.ndarray | None = None
    gap_trace: np.ndarray | None = None
    energy_trace: np.ndarray | None = None

    def summary(self) -> dict:
        return {"F": self.F, "F1": self.F1, "F2": self.F2, "alpha": self.alpha}


def slice_spectra(p: AdiabaticProblem, sch: Schedule, T: float) -> SliceSpectra:
    if not T > 0:
        raise ValidationError(f"duration T must be positive, got {T}")
    m1, m2 = sch.midpoints()
    dt = T / sch.M
    evals, evecs = qcore.eigh_stack(hamiltonian_stack(p, m1, m2), fix=False)
    phases = np.exp(-1j * dt * evals)
    return SliceSpectra(dt, evals, np.ascontiguousarray(evecs), np.ascontiguousarray(phases))


def propagate(p: AdiabaticProblem, sch: Schedule, T: float) -> Trajectory:
    spec = slice_spectra(p, sch, T)
    psi0 = np.ascontiguousarray(p.initial_state, dtype=complex)
    states = kernels.propagate(spec.vectors, spec.phases, psi0)
    return Trajectory(states, float(T), spec)


def fidelity_F1(traj: Trajectory, p: AdiabaticProblem) -> float:
    return float(abs(np.vdot(p.target_state, traj.final)) ** 2)


def trapezoid_weights(M: int) -> np.ndarray:
    w = np.ones(M + 1)
    w[0] = w[-1] = 0.5
    return w


def energy_trace(traj: Trajectory, p: AdiabaticProblem, sch: Schedule) -> np.ndarray:
    e, _, _ = kernels.energies(
        traj.states, np.ascontiguousarray(p.H_I), np.ascontiguousarray(p.H_P), sch.u1, sch.u2
    )
    return e


def energy_F2(traj: Trajectory, p: AdiabaticProblem, sch: Schedule, T: float | None = None) -> float:
    """-(1/T) * integral of <psi|H|psi> dt; with a uniform grid the T cancels."""
    e = energy_trace(traj, p, sch)
    return float(-np.dot(trapezoid_weights(sch.M), e) / sch.M)


def ground_population_trace(traj: Trajectory, p: AdiabaticProblem, sch: Schedule) -> np.ndarray:
    """|<phi_0(s_k)|psi(s_k)>|^2, summed over the ground subspace when degenerate."""
    evals, evecs = qcore.eigh_stack(hamiltonian_stack(p, sch.u1, sch.u2))
    amps = np.abs(np.einsum("kij,ki->kj", evecs.conj(), traj.states)) ** 2
    in_ground = evals - evals[:, :1] < DEGENERACY_TOL
    return np.sum(amps * in_ground, axis=1)


def gap_trace(p: AdiabaticProblem, sch: Schedule) -> np.ndarray:
    evals = np.linalg.eigvalsh(hamiltonian_stack(p, sch.u1, sch.u2))
    if evals.shape[1] < 2:
        return np.full(evals.shape[0], np.inf)
    return np.maximum(evals[:, 1] - evals[:, 0], 0.0)


def score(p: AdiabaticProblem, sch: Schedule, T: float, alpha: float) -> tuple[float, float, float]:
    """(F, F1, F2) without the diagnostic traces."""
    traj = propagate(p, sch, T)
    f1 = fidelity_F1(traj, p)
    f2 = energy_F2(traj, p, sch)
    return f1 + alpha * f2, f1, f2


def objective(p: AdiabaticProblem, sch: Schedule, T: float, alpha: float, traces: bool = True) -> ObjectiveReport:
    traj = propagate(p, sch, T)
    f1 = fidelity_F1(traj, p)
    e = energy_trace(traj, p, sch)
    f2 = float(-np.dot(trapezoid_weights(sch.M), e) / sch.M)
    if not traces:
        return ObjectiveReport(f1 + alpha * f2, f1, f2, alpha)
    return ObjectiveReport(
        f1 + alpha * f2,
        f1,
        f2,
        alpha,
        P0_trace=ground_population_trace(traj, p, sch),
        gap_trace=gap_trace(p, sch),
        energy_trace=e,
    )


TRACE_COLUMNS = ("s", "P0", "gap", "energy_expectation")


def write_trace_csv(report: ObjectiveReport, sch: Schedule, path) -> None:
    if report.P0_trace is None:
        raise ValueError("report has no traces; call objective(..., traces=True)")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for row in zip(sch.s, report.P0_trace, report.gap_trace, report.energy_trace):
            w.writerow([repr(float(v)) for v in row])
