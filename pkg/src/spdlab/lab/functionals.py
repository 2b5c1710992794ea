"""The scalar functionals whose (log-)convexity the lab certifies.

Norm functionals are computed as logarithms first: ``g`` applied to
large eigenvalues (``sinh``, ``exp``) overflows long before its log does.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegeneracyError, DimensionError, DomainError, RangeError
from ..geofn import PhiFn
from ..geometry import polar_geodesic_form, weighted_geomean
from ..maps import apply_map
from ..norms import log_gauge
from ..spectral import EPS_PD, HermitianMatrix, SpdMatrix, fractional_power
from .instances import CongruenceInstance, GeodesicInstance

PSD_NEG_RTOL = 1e-9


def _tvec(t, m) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size == 1 and m > 1:
        t = np.full(m, t[0])
    if t.size != m:
        raise DimensionError(f"expected {m} exponents, got {t.size}")
    return t


def spectrum_for_g(M: HermitianMatrix, psd: bool = False) -> np.ndarray:
    """Eigenvalues of ``M`` checked for the domain of ``g``.

    With ``psd=False`` the matrix must clear the positive definite floor;
    with ``psd=True`` round-off negatives are clamped to zero.
    """
    lam = M.eigenvalues
    top = max(lam[0], 0.0)
    if psd:
        if lam[-1] < -PSD_NEG_RTOL * max(top, 1e-300):
            raise DomainError(f"matrix is not positive semidefinite: lambda_min={lam[-1]:.3e}")
        return np.clip(lam, 0.0, None)
    if not lam[-1] > M.dim * EPS_PD * top:
        raise DegeneracyError(
            f"map output lost positivity: lambda_min={lam[-1]:.3e}, lambda_max={lam[0]:.3e}"
        )
    return lam


def log_norm_of_g(M: HermitianMatrix, g, norm, psd: bool = False) -> float:
    """``log ||g(M)||`` for a positive (semi)definite ``M``.

    ``g(M)`` is positive semidefinite with singular values ``g(lambda)``.
    """
    lg = np.asarray(g.log_eval(spectrum_for_g(M, psd)), dtype=float)
    if np.any(np.isnan(lg)) or np.any(lg == np.inf):
        raise RangeError(f"log {g.spec()} is not finite on the spectrum of the argument")
    return log_gauge(norm, lg)


def geodesic_sum(inst: GeodesicInstance, t) -> SpdMatrix:
    """``sum_i A_i #_{t_i} B_i``."""
    t = _tvec(t, inst.m)
    total = sum(weighted_geomean(A, B, ti).data for (A, B), ti in zip(inst.pairs, t))
    return SpdMatrix(total)


def congruence_sum(inst: CongruenceInstance, t) -> SpdMatrix:
    """``sum_i X_i* A_i^{t_i} X_i``."""
    t = _tvec(t, inst.m)
    total = sum(X.conj().T @ fractional_power(A, ti).data @ X for (A, X), ti in zip(inst.terms, t))
    return SpdMatrix(total)


def log_functional_geodesic(inst: GeodesicInstance, t) -> float:
    return log_norm_of_g(apply_map(inst.map, geodesic_sum(inst, t)), inst.g, inst.norm)


def log_functional_congruence(inst: CongruenceInstance, t) -> float:
    return log_norm_of_g(apply_map(inst.map, congruence_sum(inst, t)), inst.g, inst.norm)


def _exp(logv: float) -> float:
    with np.errstate(over="ignore"):
        v = float(np.exp(logv))
    if not np.isfinite(v):
        raise RangeError(f"functional value overflows (log value {logv:.6g})")
    return v


def functional_geodesic(inst: GeodesicInstance, t) -> float:
    """``F(t) = ||g(Phi(sum_i A_i #_{t_i} B_i))||``."""
    return _exp(log_functional_geodesic(inst, t))


def functional_congruence(inst: CongruenceInstance, t) -> float:
    """``F(t) = ||g(Phi(sum_i X_i* A_i^{t_i} X_i))||``, evaluated directly."""
    return _exp(log_functional_congruence(inst, t))


def to_geodesic(inst: CongruenceInstance) -> GeodesicInstance:
    """Same functional written along geodesics: ``X* A^t X = C #_t D``."""
    pairs = tuple(polar_geodesic_form(X, A) for A, X in inst.terms)
    return GeodesicInstance(pairs, inst.map, inst.g, inst.norm)


def trace_functional(inst, phi, t) -> float:
    """``Tr phi(M)`` for the inner sum ``M`` of either instance kind (no map applied)."""
    if isinstance(inst, GeodesicInstance):
        M = geodesic_sum(inst, t)
    elif isinstance(inst, CongruenceInstance):
        M = congruence_sum(inst, t)
    else:
        raise TypeError(f"not an instance: {type(inst).__name__}")
    lam = M.eigenvalues
    if not lam[-1] > 0:
        raise DomainError(f"phi needs a positive spectrum, got lambda_min={lam[-1]:.3e}")
    phi = phi if isinstance(phi, PhiFn) else PhiFn(phi)
    vals = np.asarray(phi(lam), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise RangeError(f"{phi.spec()} is not finite on the spectrum")
    return float(np.sum(vals))


def log_det_root_g(M: HermitianMatrix, g) -> float:
    """``log det^{1/n} g(M)``, the mean of ``log g`` over the spectrum."""
    return float(np.mean(g.log_eval(spectrum_for_g(M))))


def log_power_mean_g(M: HermitianMatrix, g, alpha: float) -> float:
    """``log (n^{-1} Tr g(M)^alpha)^{1/alpha}``."""
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    lg = np.asarray(g.log_eval(spectrum_for_g(M)), dtype=float)
    x = alpha * lg
    top = np.max(x)
    return float((top + np.log1p(np.mean(np.expm1(x - top)))) / alpha)
