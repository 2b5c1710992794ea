"""Geodesics of the positive definite cone: weighted geometric means and congruences."""

from __future__ import annotations

import numpy as np

from .errors import CommutationError, DimensionError, InvertibilityError
from .spectral import (
    EPS_PD,
    HermitianMatrix,
    SpdMatrix,
    eig_hermitian,
    fractional_power,
    opnorm,
    sqrt_and_invsqrt,
)

COMMUTE_TOL = 1e-10
INVERTIBLE_RTOL = 1e-12


def _spd(A) -> SpdMatrix:
    return A if isinstance(A, SpdMatrix) else SpdMatrix(A)


def _same_dim(A, B):
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")


def weighted_geomean(A, B, t: float) -> SpdMatrix:
    r"""Point at parameter ``t`` on the geodesic from ``A`` to ``B``.

    .. math::
        A \#_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}

    ``t`` ranges over the whole real line; ``t=0`` returns ``A`` and
    ``t=1`` returns ``B``. Overflow at extreme ``t`` raises
    :class:`~spdlab.errors.RangeError` instead of clamping.
    """
    A, B = _spd(A), _spd(B)
    _same_dim(A, B)
    t = float(t)
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    sA, isA = sqrt_and_invsqrt(A)
    inner = SpdMatrix(isA @ B.data @ isA)
    return SpdMatrix(sA @ fractional_power(inner, t).data @ sA)


def geomean(A, B) -> SpdMatrix:
    """Geometric mean ``A # B``, the midpoint of the geodesic."""
    return weighted_geomean(A, B, 0.5)


def _check_invertible(X: np.ndarray) -> None:
    s = np.linalg.svd(X, compute_uv=False)
    if not s[-1] > X.shape[0] * INVERTIBLE_RTOL * s[0]:
        raise InvertibilityError(
            f"matrix is numerically singular: sigma_min={s[-1]:.3e}, sigma_max={s[0]:.3e}"
        )


def congruence(X, A) -> HermitianMatrix:
    """``X* A X`` for invertible ``X``; stays positive definite when ``A`` is."""
    X = np.asarray(X, dtype=complex)
    A = A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)
    if X.shape != (A.dim, A.dim):
        raise DimensionError(f"X has shape {X.shape}, expected {(A.dim, A.dim)}")
    _check_invertible(X)
    out = X.conj().T @ A.data @ X
    return SpdMatrix(out) if isinstance(A, SpdMatrix) else HermitianMatrix(out)


def polar(X) -> tuple[np.ndarray, SpdMatrix]:
    """Polar decomposition ``X = U |X|`` of an invertible matrix."""
    X = np.asarray(X, dtype=complex)
    _check_invertible(X)
    P2 = SpdMatrix(X.conj().T @ X)
    P, Pinv = sqrt_and_invsqrt(P2)
    return X @ Pinv, SpdMatrix(P)


def polar_geodesic_form(X, A) -> tuple[SpdMatrix, SpdMatrix]:
    """Rewrite ``t -> X* A^t X`` as a geodesic ``C #_t D``.

    With ``X = U|X|`` one has ``X* A^t X = |X| (U* A U)^t |X|``, so
    ``C = |X|^2 = X* X`` and ``D = X* A X``.
    """
    A = _spd(A)
    X = np.asarray(X, dtype=complex)
    if X.shape != (A.dim, A.dim):
        raise DimensionError(f"X has shape {X.shape}, expected {(A.dim, A.dim)}")
    _check_invertible(X)
    C = SpdMatrix(X.conj().T @ X)
    D = SpdMatrix(X.conj().T @ A.data @ X)
    return C, D


def commutator_residual(A, B) -> float:
    """``||AB - BA||_op / (||A||_op ||B||_op)``."""
    A, B = np.asarray(A), np.asarray(B)
    scale = opnorm(A) * opnorm(B)
    if scale == 0:
        return 0.0
    return opnorm(A @ B - B @ A) / scale


def simultaneous_eig(A, B):
    """Common eigenbasis of two commuting Hermitian matrices.

    Diagonalizes ``A + c B`` for a fixed irrational ``c`` and reads both
    spectra off as Rayleigh quotients.
    """
    A = A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)
    B = B if isinstance(B, HermitianMatrix) else HermitianMatrix(B)
    res = commutator_residual(A, B)
    if res > COMMUTE_TOL:
        raise CommutationError(f"matrices do not commute: residual {res:.3e}", residual=res)
    c = np.sqrt(2.0) / np.pi
    U = eig_hermitian(HermitianMatrix(A.data + c * B.data)).eigenvectors
    UA = U.conj().T @ A.data @ U
    UB = U.conj().T @ B.data @ U
    a = np.real(np.diagonal(UA)).copy()
    b = np.real(np.diagonal(UB)).copy()
    off = max(opnorm(UA - np.diag(a)) / max(opnorm(A), 1e-300),
              opnorm(UB - np.diag(b)) / max(opnorm(B), 1e-300))
    if off > 1e3 * COMMUTE_TOL:
        raise CommutationError(f"common eigenbasis not found: off-diagonal {off:.3e}", residual=off)
    return a, b, U


def commuting_weighted_geomean(A, B, t: float) -> SpdMatrix:
    """``A #_t B = A^{1-t} B^t`` for commuting positive definite ``A, B``."""
    A, B = _spd(A), _spd(B)
    _same_dim(A, B)
    a, b, U = simultaneous_eig(A, B)
    floor = A.dim * EPS_PD
    a = np.clip(a, floor * a.max(), None)
    b = np.clip(b, floor * b.max(), None)
    vals = a ** (1.0 - t) * b ** t
    return SpdMatrix((U * vals) @ U.conj().T)
