"""Dense linear algebra for small Hermitian operators and state vectors.

States are 1-d complex numpy arrays, operators are 2-d complex numpy arrays.
Dimensions are tiny (N <= 64), so everything is dense.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when an operator or state violates its invariants."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and matching column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_state(amplitudes, normalize: bool = False) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    n = psi.size
    if n == 0 or n & (n - 1):
        raise ValidationError(f"state dimension {n} is not a power of two")
    norm = np.linalg.norm(psi)
    if normalize:
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return psi / norm
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"state norm {norm!r} differs from 1")
    return psi


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def hermitian_residual(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"operator must be square, got shape {h.shape}")
    asym = hermitian_residual(h)
    if asym >= tol:
        raise ValidationError(f"operator is not Hermitian: max asymmetry {asym:.3e}")
    return h


def fix_phases(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column (stacked over leading axes) so its first
    nonzero component is real and positive."""
    mags = np.abs(vectors)
    scale = mags.max(axis=-2, keepdims=True)
    first = np.argmax(mags > tol * np.maximum(scale, 1e-300), axis=-2)
    pivot = np.take_along_axis(vectors, first[..., None, :], axis=-2)
    phase = np.where(np.abs(pivot) > 0, pivot / np.abs(pivot), 1.0)
    return vectors / phase


def eigh(h) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian operator with a fixed phase convention."""
    h = check_hermitian(h)
    # symmetrize away round-off so LAPACK sees an exactly Hermitian matrix
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return SpectralDecomposition(evals, fix_phases(evecs))


def eigh_stack(hs: np.ndarray, fix: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Batched eigh over a (K, N, N) stack, without validation.

    Pass ``fix=False`` when only phase-invariant quantities are needed.
    """
    evals, evecs = np.linalg.eigh(hs)
    return (evals, fix_phases(evecs)) if fix else (evals, evecs)


def step_unitary(h, dt: float) -> np.ndarray:
    """exp(-i h dt) via the spectral decomposition of h."""
    dec = eigh(h)
    v = dec.eigenvectors
    return (v * np.exp(-1j * dec.eigenvalues * dt)) @ v.conj().T


def apply(u, psi) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if u.ndim != 2 or u.shape[1] != psi.shape[0]:
        raise ValidationError(
            f"dimension mismatch: operator {u.shape} vs state {psi.shape}"
        )
    return u @ psi


def inner(psi, phi) -> complex:
    """<psi|phi>, conjugate-linear in the first argument."""
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape:
        raise ValidationError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    return complex(np.vdot(psi, phi))


def expectation(h, psi, tol: float = 1e-12) -> float:
    """Real expectation value <psi|h|psi>."""
    val = np.vdot(psi, apply(h, psi))
    scale = max(1.0, abs(val.real))
    if abs(val.imag) > tol * scale * max(1.0, float(np.abs(h).max())):
        raise ValidationError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
