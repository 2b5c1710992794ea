import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spdlab.errors import DegeneracyError, DimensionError, DomainError, NotHermitianError, RangeError
from spdlab.spectral import (
    HermitianMatrix,
    SpdMatrix,
    apply_scalar_function,
    eig_hermitian,
    fractional_power,
    matrix_from_json,
    matrix_to_json,
    random_hermitian,
    random_spd,
    random_unitary,
    singular_values,
)

from conftest import rel_err

seeds = st.integers(0, 2**32)
dims = st.integers(1, 7)


# -- types --------------------------------------------------------------------

def test_hermitian_resymmetrizes_small_asymmetry():
    M = np.array([[1.0, 2.0 + 1e-12], [2.0, 3.0]])
    H = HermitianMatrix(M)
    assert np.array_equal(H.data, H.data.conj().T)
    assert 0 < H.asymmetry < 1e-11


def test_hermitian_rejects_real_asymmetry():
    with pytest.raises(NotHermitianError):
        HermitianMatrix([[1.0, 2.0], [0.0, 1.0]])


def test_hermitian_rejects_non_square_and_nonfinite():
    with pytest.raises(DimensionError):
        HermitianMatrix(np.zeros((2, 3)))
    with pytest.raises(RangeError):
        HermitianMatrix([[np.inf]])


def test_hermitian_is_immutable():
    H = HermitianMatrix(np.eye(2))
    with pytest.raises(ValueError):
        H.data[0, 0] = 5


def test_spd_floor():
    SpdMatrix(np.diag([1.0, 1e-9]))
    with pytest.raises(DegeneracyError):
        SpdMatrix(np.diag([1.0, 1e-13]))
    with pytest.raises(DegeneracyError):
        SpdMatrix(np.diag([1.0, -1.0]))


# -- eig_hermitian --------------------------------------------------------------

def test_eig_identity():
    d = eig_hermitian(np.eye(3))
    assert np.allclose(d.eigenvalues, [1, 1, 1])
    assert rel_err(d.eigenvectors.conj().T @ d.eigenvectors, np.eye(3)) < 1e-14


def test_eig_diag_sorted_desc():
    assert np.allclose(eig_hermitian(np.diag([1.0, 4.0])).eigenvalues, [4, 1])


def test_eig_random_reconstruction():
    A = random_hermitian(5, 11)
    d = eig_hermitian(A)
    assert rel_err(d.reconstruct(), A.data) < 1e-12
    assert rel_err(d.eigenvectors.conj().T @ d.eigenvectors, np.eye(5)) < 1e-11


@given(dims, seeds)
def test_eig_invariants(n, seed):
    A = random_hermitian(n, seed)
    d = eig_hermitian(A)
    assert np.all(np.diff(d.eigenvalues) <= 0)
    assert np.linalg.norm(d.reconstruct() - A.data, 2) <= 1e-11 * max(np.linalg.norm(A.data, 2), 1e-300)


# -- apply_scalar_function / fractional_power ------------------------------------

def test_apply_sqrt_diag():
    assert np.allclose(apply_scalar_function(np.diag([1.0, 4.0]), np.sqrt).data, np.diag([1.0, 2.0]))


def test_apply_identity_function():
    A = random_hermitian(4, 3)
    assert rel_err(apply_scalar_function(A, lambda x: x).data, A.data) < 1e-13


def test_exp_log_round_trip():
    A = random_spd(4, 5, 50.0)
    L = apply_scalar_function(A, np.log, domain=(0, np.inf))
    assert rel_err(apply_scalar_function(L, np.exp).data, A.data) < 1e-10


def test_apply_domain_error_reports_eigenvalue():
    with pytest.raises(DomainError, match="-1"):
        apply_scalar_function(np.diag([1.0, -1.0]), np.sqrt, domain=(0, np.inf))


def test_fractional_power_examples():
    assert np.allclose(fractional_power(np.diag([4.0, 9.0]), 0.5).data, np.diag([2.0, 3.0]))
    A = random_spd(4, 8, 100.0)
    assert rel_err(A.data @ fractional_power(A, -1).data, np.eye(4)) < 1e-10
    assert rel_err(fractional_power(fractional_power(A, 0.3), 1 / 0.3).data, A.data) < 1e-9


def test_fractional_power_exact_endpoints():
    A = random_spd(3, 1)
    assert np.array_equal(fractional_power(A, 0).data, np.eye(3))
    assert fractional_power(A, 1) is A


def test_fractional_power_overflow():
    with pytest.raises(RangeError):
        fractional_power(np.diag([1e10, 1.0]), 40)


@given(dims, seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_power_semigroup(n, seed, s, t):
    A = random_spd(n, seed, 10.0)
    lhs = fractional_power(fractional_power(A, s), t).data
    rhs = fractional_power(A, s * t).data
    assert rel_err(lhs, rhs) < 1e-10


# -- random generation -------------------------------------------------------------

def test_random_spd_scalar_and_determinism():
    a = random_spd(1, 9, 1.0)
    assert a.dim == 1 and a.data[0, 0].real > 0
    assert np.array_equal(random_spd(4, 77, 30.0).data, random_spd(4, 77, 30.0).data)


@pytest.mark.parametrize("seed", range(5))
def test_random_spd_condition(seed):
    lam = random_spd(6, seed, 1e4).eigenvalues
    assert 5e3 <= lam[0] / lam[-1] <= 2e4


@given(dims, seeds)
def test_random_unitary_is_unitary(n, seed):
    U = random_unitary(n, seed)
    assert rel_err(U.conj().T @ U, np.eye(n)) < 1e-13


# -- misc ----------------------------------------------------------------------------

def test_singular_values_paths_agree(rng):
    H = random_hermitian(5, 4)
    assert np.allclose(singular_values(H), singular_values(H.data))
    M = rng.standard_normal((4, 4))
    assert np.allclose(singular_values(M), np.sqrt(np.sort(np.linalg.eigvalsh(M.T @ M))[::-1]))


def test_matrix_json_round_trip_bit_exact():
    M = random_spd(4, 2).data
    assert np.array_equal(matrix_from_json(matrix_to_json(M)), M)
    R = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(matrix_from_json(matrix_to_json(R)), R)


def test_hermitian_algebra():
    A = HermitianMatrix(np.eye(2))
    assert sum([A, A]).data[0, 0] == 2
    assert (3 * A).data[1, 1] == 3
