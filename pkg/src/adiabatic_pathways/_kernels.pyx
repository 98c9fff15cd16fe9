# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled sequential loops for slice-by-slice propagation.

Each slice unitary is given in factored form V diag(phase) V^H, so a step
costs two N x N matrix-vector products and no matrix exponential.
"""
import numpy as np

cdef inline double complex cconj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


def propagate(const double complex[:, :, ::1] V,
              const double complex[:, ::1] phases,
              const double complex[::1] psi0):
    """States psi_0 .. psi_M with psi_{k+1} = V_k diag(phases_k) V_k^H psi_k."""
    cdef Py_ssize_t M = V.shape[0]
    cdef Py_ssize_t N = V.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double complex acc
    out = np.empty((M + 1, N), dtype=np.complex128)
    tmp_arr = np.empty(N, dtype=np.complex128)
    cdef double complex[:, ::1] st = out
    cdef double complex[::1] tmp = tmp_arr
    for i in range(N):
        st[0, i] = psi0[i]
    with nogil:
        for k in range(M):
            for i in range(N):
                acc = 0
                for j in range(N):
                    acc = acc + cconj(V[k, j, i]) * st[k, j]
                tmp[i] = acc * phases[k, i]
            for i in range(N):
                acc = 0
                for j in range(N):
                    acc = acc + V[k, i, j] * tmp[j]
                st[k + 1, i] = acc
    return out


def costates(const double complex[:, :, ::1] V,
             const double complex[:, ::1] phases,
             const double complex[:, ::1] seeds):
    """Backward sweep chi_M = seeds_M, chi_k = seeds_k + U_k^H chi_{k+1}."""
    cdef Py_ssize_t M = V.shape[0]
    cdef Py_ssize_t N = V.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double complex acc
    out = np.empty((M + 1, N), dtype=np.complex128)
    tmp_arr = np.empty(N, dtype=np.complex128)
    cdef double complex[:, ::1] ch = out
    cdef double complex[::1] tmp = tmp_arr
    for i in range(N):
        ch[M, i] = seeds[M, i]
    with nogil:
        for k in range(M - 1, -1, -1):
            for i in range(N):
                acc = 0
                for j in range(N):
                    acc = acc + cconj(V[k, j, i]) * ch[k + 1, j]
                tmp[i] = acc * cconj(phases[k, i])
            for i in range(N):
                acc = seeds[k, i]
                for j in range(N):
                    acc = acc + V[k, i, j] * tmp[j]
                ch[k, i] = acc
    return out


def energies(const double complex[:, ::1] states,
             const double complex[:, ::1] HI,
             const double complex[:, ::1] HP,
             const double[::1] u1,
             const double[::1] u2):
    """Per-grid-point energy u1_k <psi_k|H_I|psi_k> + u2_k <psi_k|H_P|psi_k>.

    Also returns the two expectation traces separately.
    """
    cdef Py_ssize_t K = states.shape[0]
    cdef Py_ssize_t N = states.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double complex ai, ap, ci
    e_arr = np.empty(K)
    ei_arr = np.empty(K)
    ep_arr = np.empty(K)
    cdef double[::1] e = e_arr
    cdef double[::1] ei = ei_arr
    cdef double[::1] ep = ep_arr
    with nogil:
        for k in range(K):
            ai = 0
            ap = 0
            for i in range(N):
                ci = cconj(states[k, i])
                for j in range(N):
                    ai = ai + ci * HI[i, j] * states[k, j]
                    ap = ap + ci * HP[i, j] * states[k, j]
            ei[k] = ai.real
            ep[k] = ap.real
            e[k] = u1[k] * ai.real + u2[k] * ap.real
    return e_arr, ei_arr, ep_arr
