"""Problem Hamiltonians: Landau-Zener and Grover search.

The controlled Hamiltonian is ``H(u1, u2) = u1 * H_I + u2 * H_P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .qcore import ValidationError

DEGENERACY_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class GapReport:
    gap: float
    ground_state: np.ndarray
    degenerate: bool


@dataclass(frozen=True, eq=False)
class AdiabaticProblem:
    """A pair (H_I, H_P) acting on ``2**n`` levels.

    ``search_dim`` is the size of the Hilbert space the problem stands for.
    It equals ``2**n`` except for reduced Grover problems, where a small
    effective operator pair represents a much larger search space.
    """

    n: int
    H_I: np.ndarray
    H_P: np.ndarray
    label: str = ""
    search_dim: int | None = None
    initial_state: np.ndarray = field(init=False, repr=False)
    target_state: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"qubit count must be >= 1, got {self.n}")
        dim = 2**self.n
        hi = qcore.check_hermitian(self.H_I)
        hp = qcore.check_hermitian(self.H_P)
        for name, h in (("H_I", hi), ("H_P", hp)):
            if h.shape != (dim, dim):
                raise ValidationError(f"{name} has shape {h.shape}, expected {(dim, dim)}")
        start = gap_and_ground(hi)
        end = gap_and_ground(hp)
        if start.degenerate:
            raise ValidationError(f"ground state of H_I is degenerate (gap {start.gap:.3e})")
        if end.degenerate:
            raise ValidationError(f"ground state of H_P is degenerate (gap {end.gap:.3e})")
        hi.setflags(write=False)
        hp.setflags(write=False)
        object.__setattr__(self, "H_I", hi)
        object.__setattr__(self, "H_P", hp)
        object.__setattr__(self, "initial_state", start.ground_state)
        object.__setattr__(self, "target_state", end.ground_state)
        if self.search_dim is None:
            object.__setattr__(self, "search_dim", dim)

    @property
    def dim(self) -> int:
        return self.H_I.shape[0]


def hamiltonian_at(p: AdiabaticProblem, u1: float, u2: float) -> np.ndarray:
    if not (np.isfinite(u1) and np.isfinite(u2)):
        raise ValidationError(f"controls must be finite, got ({u1}, {u2})")
    return u1 * p.H_I + u2 * p.H_P


def hamiltonian_stack(p: AdiabaticProblem, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """(K, N, N) stack of H(u1[k], u2[k])."""
    u1 = np.asarray(u1, dtype=float)[:, None, None]
    u2 = np.asarray(u2, dtype=float)[:, None, None]
    return u1 * p.H_I + u2 * p.H_P


def gap_and_ground(h) -> GapReport:
    dec = qcore.eigh(h)
    e = dec.eigenvalues
    gap = float(e[1] - e[0]) if e.size > 1 else float("inf")
    gap = max(gap, 0.0)
    return GapReport(gap, dec.eigenvectors[:, 0].copy(), gap < DEGENERACY_TOL)


def landau_zener() -> AdiabaticProblem:
    return AdiabaticProblem(1, SIGMA_Z, SIGMA_X, label="landau-zener")


def _uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1 / np.sqrt(dim), dtype=complex)


def grover(n: int, m: int = 0) -> AdiabaticProblem:
    """H_I = I - |phi><phi| (uniform superposition), H_P = I - |m><m|."""
    dim = 2**n
    if not 0 <= m < dim:
        raise ValidationError(f"marked index {m} out of range for n={n}")
    phi = _uniform(dim)
    eye = np.eye(dim, dtype=complex)
    hi = eye - np.outer(phi, phi.conj())
    hp = eye.copy()
    hp[m, m] = 0.0
    return AdiabaticProblem(n, hi, hp, label=f"grover-n{n}-m{m}")


def grover_reduced(n: int) -> AdiabaticProblem:
    """Grover problem restricted to the invariant span of |m> and |phi>.

    Basis: |m> and the normalized part of |phi> orthogonal to |m>. For
    controls in [0, 1] the remaining levels sit at u1 + u2, never below the
    block's excited level, so gaps and ground populations match the full
    problem.
    """
    dim = 2**n
    c = 1 / np.sqrt(dim)
    s = np.sqrt(1 - 1 / dim)
    # |phi> = c|m> + s|m_perp>
    hi = np.array([[1 - c * c, -c * s], [-c * s, 1 - s * s]], dtype=complex)
    hp = np.diag([0.0, 1.0]).astype(complex)
    return AdiabaticProblem(1, hi, hp, label=f"grover-reduced-n{n}", search_dim=dim)


def reduced_basis(n: int, m: int = 0) -> np.ndarray:
    """Columns |m>, |m_perp>: embeds the first two reduced levels in the full space."""
    dim = 2**n
    phi = _uniform(dim)
    e_m = qcore.basis_state(m, dim)
    perp = phi - np.vdot(e_m, phi) * e_m
    perp /= np.linalg.norm(perp)
    return np.column_stack([e_m, perp])


def problem_from_name(name: str, n: int = 1, m: int = 0, reduced: bool = False) -> AdiabaticProblem:
    if name == "landau-zener":
        return landau_zener()
    if name == "grover":
        return grover_reduced(n) if reduced else grover(n, m)
    raise ValidationError(f"unknown problem {name!r}")
