import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiabatic_pathways import qcore
from adiabatic_pathways.hamiltonians import SIGMA_X, SIGMA_Z
from adiabatic_pathways.qcore import ValidationError

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def test_eigh_sigma_z():
    dec = qcore.eigh(SIGMA_Z)
    np.testing.assert_allclose(dec.eigenvalues, [-1, 1])
    np.testing.assert_allclose(dec.eigenvectors[:, 0], KET1)
    np.testing.assert_allclose(dec.eigenvectors[:, 1], KET0)


def test_eigh_sigma_x_phase_convention():
    dec = qcore.eigh(SIGMA_X)
    np.testing.assert_allclose(dec.eigenvalues, [-1, 1], atol=1e-15)
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(dec.eigenvectors[:, 0], [r, -r], atol=1e-15)
    np.testing.assert_allclose(dec.eigenvectors[:, 1], [r, r], atol=1e-15)


@pytest.mark.parametrize("dim", [2, 8, 64])
def test_eigh_random_reconstruction(rng, dim):
    h = qcore.random_hermitian(dim, rng)
    dec = qcore.eigh(h)
    norm = np.linalg.norm(h, 2)
    assert np.max(np.abs(dec.reconstruct() - h)) < 1e-10 * norm
    v = dec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-10
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    # phase convention: first nonzero entry of each column is real positive
    for col in v.T:
        first = col[np.argmax(np.abs(col) > 1e-12)]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_eigh_is_deterministic(rng):
    h = qcore.random_hermitian(8, rng)
    a, b = qcore.eigh(h), qcore.eigh(h.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_eigh_idempotent_under_reconstruction(rng):
    dec = qcore.eigh(qcore.random_hermitian(8, rng))
    again = qcore.eigh(dec.reconstruct())
    np.testing.assert_allclose(again.eigenvalues, dec.eigenvalues, atol=1e-10)


def test_eigh_rejects_non_hermitian():
    h = np.array([[1, 2], [0, 1]], dtype=complex)
    with pytest.raises(ValidationError, match="2.000e\\+00"):
        qcore.eigh(h)


def test_step_unitary_examples():
    np.testing.assert_allclose(qcore.step_unitary(SIGMA_Z, np.pi), -np.eye(2), atol=1e-15)
    np.testing.assert_allclose(qcore.step_unitary(np.zeros((4, 4)), 1.7), np.eye(4))
    # exp(-i pi/2 sigma_x) = cos(pi/2) I - i sin(pi/2) sigma_x
    np.testing.assert_allclose(qcore.step_unitary(SIGMA_X, np.pi / 2), -1j * SIGMA_X, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim_exp=st.integers(1, 5), dt=st.floats(-5, 5))
def test_step_unitary_inverse_and_unitarity(seed, dim_exp, dt):
    rng = np.random.default_rng(seed)
    h = qcore.random_hermitian(2**dim_exp, rng)
    u = qcore.step_unitary(h, dt)
    eye = np.eye(2**dim_exp)
    assert np.max(np.abs(u.conj().T @ u - eye)) < 1e-10
    assert np.max(np.abs(u @ qcore.step_unitary(h, -dt) - eye)) < 1e-9


def test_apply(rng):
    psi = qcore.random_state(4, rng)
    np.testing.assert_array_equal(qcore.apply(np.eye(4), psi), psi)
    np.testing.assert_allclose(np.abs(qcore.apply(-np.eye(4), psi)), np.abs(psi))
    u = qcore.step_unitary(qcore.random_hermitian(4, rng), 0.37)
    assert abs(np.linalg.norm(qcore.apply(u, psi)) - 1) < 1e-10
    with pytest.raises(ValidationError):
        qcore.apply(np.eye(2), psi)


def test_inner(rng):
    assert qcore.inner(KET0, KET0) == 1
    assert qcore.inner(KET0, KET1) == 0
    # conjugate-linear in the first slot
    assert qcore.inner(1j * KET0, KET0) == -1j
    for _ in range(100):
        a, b = qcore.random_state(8, rng), qcore.random_state(8, rng)
        assert abs(qcore.inner(a, b)) <= 1 + 1e-10


def test_expectation(rng):
    assert qcore.expectation(SIGMA_Z, KET0) == 1
    plus = (KET0 + KET1) / np.sqrt(2)
    assert abs(qcore.expectation(SIGMA_Z, plus)) < 1e-15
    d = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)
    for _ in range(50):
        assert 1 <= qcore.expectation(d, qcore.random_state(4, rng)) <= 4


def test_expectation_of_eigenvectors(rng):
    h = qcore.random_hermitian(8, rng)
    dec = qcore.eigh(h)
    for k in range(8):
        assert abs(qcore.expectation(h, dec.eigenvectors[:, k]) - dec.eigenvalues[k]) < 1e-10


def test_as_state_validation():
    with pytest.raises(ValidationError):
        qcore.as_state([1, 0, 0])
    with pytest.raises(ValidationError):
        qcore.as_state([1, 1])
    np.testing.assert_allclose(qcore.as_state([1, 1], normalize=True), [2**-0.5, 2**-0.5])
