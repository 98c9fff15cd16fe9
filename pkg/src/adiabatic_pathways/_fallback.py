"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the compiled module; used when the extension
is not built or ``ADIABATIC_PATHWAYS_PURE=1`` is set.
"""
import numpy as np


def propagate(V, phases, psi0):
    M, N = phases.shape
    out = np.empty((M + 1, N), dtype=complex)
    out[0] = psi0
    vh = V.conj().transpose(0, 2, 1)
    psi = out[0]
    for k in range(M):
        psi = V[k] @ (phases[k] * (vh[k] @ psi))
        out[k + 1] = psi
    return out


def costates(V, phases, seeds):
    M, N = phases.shape
    out = np.empty((M + 1, N), dtype=complex)
    out[M] = seeds[M]
    vh = V.conj().transpose(0, 2, 1)
    back = phases.conj()
    chi = out[M]
    for k in range(M - 1, -1, -1):
        chi = seeds[k] + V[k] @ (back[k] * (vh[k] @ chi))
        out[k] = chi
    return out


def energies(states, HI, HP, u1, u2):
    ei = np.einsum("ki,ij,kj->k", states.conj(), HI, states).real
    ep = np.einsum("ki,ij,kj->k", states.conj(), HP, states).real
    return u1 * ei + u2 * ep, ei, ep
