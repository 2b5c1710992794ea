import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spdlab.errors import DimensionError, DomainError
from spdlab.majorization import (
    SpectrumVector,
    check_horn,
    diag_down,
    eigvals_desc,
    weak_log_majorize,
    weak_log_majorization_slack,
    weak_majorize,
)
from spdlab.spectral import eig_hermitian, random_hermitian, random_spd

seeds = st.integers(0, 2**32)


def test_eigvals_desc_examples():
    assert np.array_equal(eigvals_desc(np.diag([1.0, 3.0, 2.0])).values, [3, 2, 1])
    assert np.allclose(eigvals_desc(np.eye(4)).values, 1)
    H = random_hermitian(5, 2)
    assert np.allclose(eigvals_desc(H).values, eig_hermitian(H).eigenvalues)


def test_spectrum_vector_rejects_increasing():
    with pytest.raises(DomainError):
        SpectrumVector(np.array([1.0, 2.0]))


def test_diag_down():
    assert np.allclose(diag_down(np.diag([1.0, 3.0])).data, np.diag([3.0, 1.0]))
    D = diag_down(random_hermitian(4, 1))
    assert np.array_equal(diag_down(D).data, D.data)


def test_diag_down_same_characteristic_polynomial():
    S = random_hermitian(5, 8)
    assert np.allclose(np.poly(diag_down(S).data), np.poly(S.data), rtol=1e-10, atol=1e-10)


def test_weak_majorize_examples():
    x = SpectrumVector(np.array([3.0, 1.0]))
    assert weak_majorize(x, x)
    assert not weak_majorize([3.0, 1.0], [2.0, 2.0])
    assert weak_majorize([2.0, 2.0], [3.0, 1.0])
    with pytest.raises(DimensionError):
        weak_majorize([1.0], [1.0, 2.0])


def test_weak_log_majorize_examples():
    assert weak_log_majorize(np.diag([3.0, 2.0, 1.0]), np.diag([4.0, 2.0, 1.0]))
    S = random_spd(4, 3)
    assert weak_log_majorize(S, S)
    assert not weak_log_majorize(np.diag([4.0, 1.0]), np.diag([3.0, 3.0]))


def test_weak_log_majorize_zero_eigenvalues():
    assert weak_log_majorize(np.diag([2.0, 0.0]), np.diag([3.0, 1.0]))
    assert not weak_log_majorize(np.diag([2.0, 1.0]), np.diag([3.0, 0.0]))


def test_weak_log_majorize_negative_is_domain_error():
    with pytest.raises(DomainError):
        weak_log_majorize(np.diag([1.0, -0.5]), np.eye(2))


@given(st.integers(1, 6), seeds)
def test_log_majorization_implies_weak(n, seed):
    # x <_wlog y implies x <_w y for nonnegative vectors
    rng = np.random.default_rng(seed)
    y = np.sort(rng.exponential(size=n))[::-1]
    x = y * np.sort(rng.uniform(0.2, 1.0, n))
    x = np.sort(x)[::-1]
    assert weak_log_majorization_slack(np.diag(x), np.diag(y)) >= -1e-12
    assert weak_majorize(x, y)


def test_horn_examples():
    r = check_horn(np.diag([3.0, 2.0, 1.0]), np.diag([5.0, 4.0, 0.5]))
    assert abs(r.slack) < 1e-14
    assert abs(check_horn(np.eye(3), np.eye(3)).slack) < 1e-15


@given(st.integers(1, 6), seeds)
def test_horn_random(n, seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert check_horn(S, T).passed
