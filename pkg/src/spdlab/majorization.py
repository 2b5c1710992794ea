"""Eigenvalue orderings, weak majorization and weak log-majorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .results import CheckResult
from .spectral import EPS_PD, HermitianMatrix, singular_values

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumVector:
    values: np.ndarray
    kind: str = "eigenvalues"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(np.diff(v) > 0):
            raise DomainError("spectrum must be nonincreasing")
        if self.kind == "singular values" and np.any(v < 0):
            raise DomainError("singular values must be nonnegative")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _herm(S) -> HermitianMatrix:
    return S if isinstance(S, HermitianMatrix) else HermitianMatrix(S)


def eigvals_desc(S) -> SpectrumVector:
    return SpectrumVector(_herm(S).eigenvalues.copy())


def singvals_desc(M) -> SpectrumVector:
    return SpectrumVector(singular_values(M), kind="singular values")


def diag_down(S) -> HermitianMatrix:
    """``S`` with its eigenvalues, nonincreasing, down the diagonal."""
    return HermitianMatrix(np.diag(_herm(S).eigenvalues))


def _vec(x) -> np.ndarray:
    if isinstance(x, SpectrumVector):
        return x.values
    if isinstance(x, HermitianMatrix):
        return x.eigenvalues
    x = np.asarray(x)
    if x.ndim == 2:
        return HermitianMatrix(x).eigenvalues
    return np.sort(x.astype(float))[::-1]


def weak_majorization_slack(x, y) -> float:
    """Minimum over ``k`` of ``(sum_{j<=k} y_j - sum_{j<=k} x_j)`` over the larger prefix magnitude."""
    x, y = _vec(x), _vec(y)
    if x.size != y.size:
        raise DimensionError(f"length mismatch: {x.size} vs {y.size}")
    px, py = np.cumsum(x), np.cumsum(y)
    scale = np.maximum(np.maximum(np.abs(px), np.abs(py)), 1e-300)
    return float(np.min((py - px) / scale))


def weak_majorize(x, y, tol: float = DEFAULT_TOL) -> bool:
    """``x <_w y``: every prefix sum of sorted ``x`` is at most that of ``y``."""
    return weak_majorization_slack(x, y) >= -tol


def _log_spectrum(S, label) -> np.ndarray:
    lam = _vec(S)
    big = max(abs(lam[0]), abs(lam[-1]))
    if lam[-1] < -DEFAULT_TOL * big:
        raise DomainError(f"{label} has a negative eigenvalue {lam[-1]:.3e}")
    floor = lam.size * EPS_PD * max(lam[0], 0.0)
    out = np.full(lam.shape, -np.inf)
    pos = lam > floor
    out[pos] = np.log(lam[pos])
    return out


def log_majorization_prefix_slacks(S, T) -> np.ndarray:
    """Per-``k`` log slacks ``sum log lambda_j(T) - sum log lambda_j(S)`` (j <= k).

    Eigenvalues at or below ``dim * eps_pd * lambda_1`` count as zero
    (log = -inf). Each slack is divided by ``max(1, |prefix|)``.
    """
    ls, lt = _log_spectrum(S, "S"), _log_spectrum(T, "T")
    if ls.size != lt.size:
        raise DimensionError(f"dimension mismatch: {ls.size} vs {lt.size}")
    ps, pt = np.cumsum(ls), np.cumsum(lt)
    out = np.empty(ps.size)
    for k in range(ps.size):
        if ps[k] == -np.inf:
            out[k] = np.inf
        elif pt[k] == -np.inf:
            out[k] = -np.inf
        else:
            out[k] = (pt[k] - ps[k]) / max(1.0, abs(ps[k]), abs(pt[k]))
    return out


def weak_log_majorization_slack(S, T) -> float:
    return float(np.min(log_majorization_prefix_slacks(S, T)))


def weak_log_majorize(S, T, tol: float = DEFAULT_TOL) -> bool:
    """``S <_wlog T`` for positive semidefinite ``S, T``."""
    return weak_log_majorization_slack(S, T) >= -tol


def check_horn(S, T, tol: float = DEFAULT_TOL) -> CheckResult:
    """Horn: ``prod_{j<=k} sigma_j(ST) <= prod_{j<=k} sigma_j(S) sigma_j(T)`` for each ``k``."""
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    if S.shape != T.shape or S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"need square matrices of equal size, got {S.shape} and {T.shape}")
    with np.errstate(divide="ignore"):
        lst = np.log(singular_values(S @ T))
        ls = np.log(singular_values(S))
        lt = np.log(singular_values(T))
    left = np.cumsum(lst)
    right = np.cumsum(ls) + np.cumsum(lt)
    slacks = []
    for a, b in zip(left, right):
        if a == -np.inf:
            slacks.append(np.inf)
        elif b == -np.inf:
            slacks.append(-np.inf)
        else:
            slacks.append((b - a) / max(1.0, abs(a), abs(b)))
    slacks = np.array(slacks)
    k = int(np.argmin(slacks))
    return CheckResult(
        "horn", float(slacks[k]), tol,
        details={f"k{j + 1}": float(s) for j, s in enumerate(slacks)},
        witness={"worst_k": k + 1},
    )
