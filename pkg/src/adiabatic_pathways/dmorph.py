"""D-MORPH gradient baseline on the per-grid-point control table.

The gradient is exact for the discretized objective: slice unitaries are
differentiated with the Frechet derivative of the matrix exponential in the
slice eigenbasis, and the costate is swept backwards with the adjoint
slice unitaries.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass

import numpy as np

from . import dynamics, kernels
from .hamiltonians import AdiabaticProblem, hamiltonian_stack
from .qcore import ValidationError
from .schedules import Schedule, linear


@dataclass(frozen=True)
class DmorphConfig:
    lambda0: float = 0.02
    shrink: float = 0.5
    max_trials: int = 100
    G_max: int = 1000
    M: int = 100

    def validate(self) -> "DmorphConfig":
        if not self.lambda0 > 0:
            raise ValidationError(f"lambda0 must be positive, got {self.lambda0}")
        if not 0 < self.shrink < 1:
            raise ValidationError(f"shrink must lie in (0, 1), got {self.shrink}")
        if self.max_trials < 1 or self.G_max < 0:
            raise ValidationError("max_trials must be >= 1 and G_max >= 0")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ControlGradient:
    """dF/du on the grid (shape (M + 1,) per control) plus the slice part.

    ``slice_u1``/``slice_u2`` hold dF/d(midpoint control) of the propagated
    part alone; ``u1``/``u2`` combine it with the explicit energy term and are
    the derivatives with respect to the schedule's grid values.
    """

    u1: np.ndarray
    u2: np.ndarray
    slice_u1: np.ndarray
    slice_u2: np.ndarray
    F: float
    F1: float
    F2: float

    def as_array(self) -> np.ndarray:
        return np.stack([self.u1, self.u2])


def _exp_divided_differences(evals: np.ndarray, dt: float) -> np.ndarray:
    """(exp(-i E_i dt) - exp(-i E_j dt)) / (E_i - E_j), continuous at E_i = E_j."""
    ei = evals[:, :, None]
    ej = evals[:, None, :]
    half = 0.5 * dt * (ei - ej)
    return -1j * dt * np.exp(-0.5j * dt * (ei + ej)) * np.sinc(half / np.pi)


def gradient(problem: AdiabaticProblem, schedule: Schedule, T: float, alpha: float) -> ControlGradient:
    traj = dynamics.propagate(problem, schedule, T)
    spec = traj.spectra
    psi = traj.states
    M = schedule.M
    w = dynamics.trapezoid_weights(M)
    hi = np.ascontiguousarray(problem.H_I)
    hp = np.ascontiguousarray(problem.H_P)
    e, ei, ep = kernels.energies(psi, hi, hp, schedule.u1, schedule.u2)

    overlap = np.vdot(problem.target_state, psi[-1])
    f1 = float(abs(overlap) ** 2)
    f2 = float(-np.dot(w, e) / M)

    # dF = sum_k 2 Re <seed_k | d psi_k>
    h_grid = hamiltonian_stack(problem, schedule.u1, schedule.u2)
    seeds = (-(alpha / M) * w)[:, None] * np.einsum("kij,kj->ki", h_grid, psi)
    seeds[-1] += overlap * problem.target_state
    chi = kernels.costates(spec.vectors, spec.phases, np.ascontiguousarray(seeds))

    V = spec.vectors
    Vh = V.conj().transpose(0, 2, 1)
    x = np.einsum("kij,kj->ki", Vh, chi[1:])
    y = np.einsum("kij,kj->ki", Vh, psi[:-1])
    L = _exp_divided_differences(spec.energies, spec.dt)
    slices = []
    for h in (hi, hp):
        a = Vh @ h @ V
        slices.append(2.0 * np.einsum("ki,kij,kj->k", x.conj(), L * a, y).real)

    explicit = (-(alpha / M) * w) * np.stack([ei, ep])
    grid = explicit.copy()
    for l in range(2):
        grid[l, :-1] += 0.5 * slices[l]
        grid[l, 1:] += 0.5 * slices[l]
    return ControlGradient(grid[0], grid[1], slices[0], slices[1], f1 + alpha * f2, f1, f2)


def projected(schedule: Schedule, grad: ControlGradient) -> np.ndarray:
    """Gradient with pinned endpoints and outward components at active bounds zeroed."""
    g = grad.as_array().copy()
    u = np.stack([schedule.u1, schedule.u2])
    g[:, 0] = 0.0
    g[:, -1] = 0.0
    g[(u <= 0.0) & (g < 0)] = 0.0
    g[(u >= 1.0) & (g > 0)] = 0.0
    return g


def apply_update(schedule: Schedule, direction: np.ndarray, lam: float) -> Schedule:
    u = np.clip(np.stack([schedule.u1, schedule.u2]) + lam * direction, 0.0, 1.0)
    u[0, 0], u[0, -1] = 1.0, 0.0
    u[1, 0], u[1, -1] = 0.0, 1.0
    return Schedule(u[0], u[1])


def update_direction(schedule: Schedule, grad: ControlGradient, T: float) -> np.ndarray:
    """Functional derivative dF/du(t): the projected grid gradient per unit time."""
    return projected(schedule, grad) / (T / schedule.M)


def dmorph_step(problem: AdiabaticProblem, schedule: Schedule, T: float, alpha: float, lam: float,
                grad: ControlGradient | None = None):
    """One tentative refresh u <- clip(u + lam dF/du). Returns (schedule, F, accepted)."""
    if grad is None:
        grad = gradient(problem, schedule, T, alpha)
    new = apply_update(schedule, update_direction(schedule, grad, T), lam)
    f_new = dynamics.score(problem, new, T, alpha)[0]
    if f_new > grad.F:
        return new, f_new, True
    return schedule, grad.F, False


@dataclass
class DmorphResult:
    schedule: Schedule
    report: dynamics.ObjectiveReport
    history: list
    config: DmorphConfig
    converged: bool
    iterations: int


def dmorph_optimize(problem: AdiabaticProblem, T: float, alpha: float, initial: Schedule | None = None,
                    config: DmorphConfig = DmorphConfig(), callback=None) -> DmorphResult:
    config.validate()
    sch = initial if initial is not None else linear(config.M)
    sch.check()
    lam = config.lambda0
    grad = gradient(problem, sch, T, alpha)
    history = [(0, grad.F, grad.F1, grad.F2, lam, 0)]
    converged = False
    it = 0
    while it < config.G_max:
        direction = update_direction(sch, grad, T)
        accepted = False
        trials = 0
        while trials < config.max_trials:
            trials += 1
            cand = apply_update(sch, direction, lam)
            f_new = dynamics.score(problem, cand, T, alpha)[0]
            if f_new > grad.F:
                accepted = True
                break
            lam *= config.shrink
        if not accepted:
            converged = True
            break
        it += 1
        sch = cand
        grad = gradient(problem, sch, T, alpha)
        history.append((it, grad.F, grad.F1, grad.F2, lam, trials))
        if callback is not None:
            callback(it, grad)
    report = dynamics.objective(problem, sch, T, alpha)
    return DmorphResult(sch, report, history, config, converged, it)


HISTORY_COLUMNS = ("iteration", "F", "F1", "F2", "lambda", "trials_used")


def write_history_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_COLUMNS)
        for it, f, f1, f2, lam, trials in history:
            w.writerow([it, repr(float(f)), repr(float(f1)), repr(float(f2)), repr(float(lam)), trials])
