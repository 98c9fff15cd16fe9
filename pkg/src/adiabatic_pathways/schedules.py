"""Control schedules on the uniform scaled-time grid s_k = k / M.

A schedule holds M + 1 samples of each control. Besides the Linear and
Roland-Cerf closed forms, candidates can be built from CRAB parameters: a
guess envelope modulated by a truncated Fourier series, min-max rescaled
onto [0, 1] and pinned to the boundary conditions.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .qcore import ValidationError

BOUND_TOL = 1e-12


class DegenerateCandidate(ValidationError):
    """A raw control is constant, so it cannot be rescaled onto [0, 1]."""


@dataclass(frozen=True, eq=False)
class Schedule:
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        u1 = np.array(self.u1, dtype=float)
        u2 = np.array(self.u2, dtype=float)
        if u1.ndim != 1 or u1.shape != u2.shape or u1.size < 3:
            raise ValidationError(f"controls need equal length >= 3, got {u1.shape}, {u2.shape}")
        u1.setflags(write=False)
        u2.setflags(write=False)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    @property
    def M(self) -> int:
        return self.u1.size - 1

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.M + 1)

    def midpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return 0.5 * (self.u1[:-1] + self.u1[1:]), 0.5 * (self.u2[:-1] + self.u2[1:])

    def violations(self) -> list[str]:
        out = []
        for name, u in (("u1", self.u1), ("u2", self.u2)):
            if not np.all(np.isfinite(u)):
                out.append(f"{name} has non-finite values")
            elif u.min() < -BOUND_TOL or u.max() > 1 + BOUND_TOL:
                out.append(f"{name} leaves [0, 1]: range [{u.min():.6g}, {u.max():.6g}]")
        if not (self.u1[0] == 1 and self.u1[-1] == 0 and self.u2[0] == 0 and self.u2[-1] == 1):
            out.append(
                "boundary conditions violated: "
                f"u1=({self.u1[0]}, {self.u1[-1]}), u2=({self.u2[0]}, {self.u2[-1]})"
            )
        return out

    def check(self) -> "Schedule":
        bad = self.violations()
        if bad:
            raise ValidationError("; ".join(bad))
        return self

    def to_csv(self, path) -> None:
        write_schedule_csv(self, path)

    @classmethod
    def from_csv(cls, path) -> "Schedule":
        return read_schedule_csv(path)


@dataclass(frozen=True)
class GuessEnvelope:
    u1: Callable[[np.ndarray], np.ndarray]
    u2: Callable[[np.ndarray], np.ndarray]


def _one_minus(s):
    return 1.0 - s


def _identity(s):
    return s * 1.0


DEFAULT_ENVELOPE = GuessEnvelope(_one_minus, _identity)


class CrabParams:
    """Flat search vector X of length 6 * N_c.

    Layout: ``X.reshape(2, 3, N_c)`` indexes (control, coefficient, harmonic)
    with coefficient order (a, b, omega).
    """

    __slots__ = ("vector", "n_harmonics")

    def __init__(self, vector, n_harmonics: int | None = None):
        x = np.array(vector, dtype=float).ravel()
        if n_harmonics is None:
            n_harmonics = x.size // 6
        if n_harmonics < 1 or x.size != 6 * n_harmonics:
            raise ValidationError(f"CRAB vector length {x.size} is not 6 * N_c")
        if not np.all(np.isfinite(x)):
            raise ValidationError("CRAB vector has non-finite entries")
        x.setflags(write=False)
        self.vector = x
        self.n_harmonics = n_harmonics

    @classmethod
    def from_parts(cls, a, b, omega) -> "CrabParams":
        """Build from (2, N_c) arrays of a, b and omega."""
        a, b, omega = (np.asarray(v, dtype=float).reshape(2, -1) for v in (a, b, omega))
        return cls(np.stack([a, b, omega], axis=1).ravel(), a.shape[1])

    @property
    def table(self) -> np.ndarray:
        return self.vector.reshape(2, 3, self.n_harmonics)

    @property
    def a(self) -> np.ndarray:
        return self.table[:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.table[:, 1]

    @property
    def omega(self) -> np.ndarray:
        return self.table[:, 2]

    def __repr__(self):
        return f"CrabParams(n_harmonics={self.n_harmonics}, vector={self.vector.tolist()})"


def grid(M: int) -> np.ndarray:
    if M < 2:
        raise ValidationError(f"slice count M must be >= 2, got {M}")
    return np.arange(M + 1) / M


def linear(M: int) -> Schedule:
    s = grid(M)
    return Schedule(1.0 - s, s)


def roland_cerf(N: int, M: int) -> Schedule:
    """Local-adiabatic schedule for Grover search over N items."""
    if N < 2:
        raise ValidationError(f"Hilbert dimension must be >= 2, got {N}")
    s = grid(M)
    r = np.sqrt(N - 1)
    u2 = 0.5 + np.tan((2 * s - 1) * np.arctan(r)) / (2 * r)
    # the closed form hits 0 and 1 only up to rounding
    u2[0], u2[-1] = 0.0, 1.0
    u2 = np.clip(u2, 0.0, 1.0)
    return Schedule(1.0 - u2, u2)


def crab_render(x: CrabParams, envelope: GuessEnvelope = DEFAULT_ENVELOPE, M: int = 100):
    """Raw (unconstrained) controls: u_l = g_l(s) * (1 + sum_k a sin(w s) + b cos(w s))."""
    s = grid(M)
    phase = x.omega[:, :, None] * s  # (2, Nc, M+1)
    mod = 1.0 + np.sum(x.a[:, :, None] * np.sin(phase) + x.b[:, :, None] * np.cos(phase), axis=1)
    return envelope.u1(s) * mod[0], envelope.u2(s) * mod[1]


def constrain(raw, M: int | None = None) -> Schedule:
    """Min-max rescale each raw control onto [0, 1], then pin the endpoints."""
    out = []
    for idx, u in enumerate(raw):
        u = np.asarray(u, dtype=float)
        if M is not None and u.size != M + 1:
            raise ValidationError(f"raw control has {u.size} samples, expected {M + 1}")
        if not np.all(np.isfinite(u)):
            raise DegenerateCandidate(f"raw u{idx + 1} has non-finite values")
        lo, hi = u.min(), u.max()
        if not hi > lo:
            raise DegenerateCandidate(f"raw u{idx + 1} is constant ({lo!r})")
        out.append((u - lo) / (hi - lo))
    u1, u2 = out
    u1[0], u1[-1] = 1.0, 0.0
    u2[0], u2[-1] = 0.0, 1.0
    return Schedule(u1, u2)


def crab_schedule(x: CrabParams, envelope: GuessEnvelope = DEFAULT_ENVELOPE, M: int = 100) -> Schedule:
    return constrain(crab_render(x, envelope, M), M)


SCHEDULE_COLUMNS = ("s", "u1", "u2")


def write_schedule_csv(sch: Schedule, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCHEDULE_COLUMNS)
        for row in zip(sch.s, sch.u1, sch.u2):
            w.writerow([repr(float(v)) for v in row])


def read_schedule_csv(path) -> Schedule:
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return Schedule([float(r["u1"]) for r in rows], [float(r["u2"]) for r in rows])
