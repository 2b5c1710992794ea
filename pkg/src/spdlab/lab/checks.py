"""Inequality checkers for the convexity theorems, their corollaries and proof steps.

Every check returns a :class:`~spdlab.results.CheckResult`. Norm
inequalities are compared in log form: ``slack = log(rhs) - log(lhs)``,
with tolerance ``tol * max(1, |logs involved|)``.
"""

from __future__ import annotations

import numpy as np

from ..errors import CommutationError, DomainError, PreconditionError, RangeError
from ..geofn import PhiFn
from ..geometry import COMMUTE_TOL, commutator_residual, geomean, weighted_geomean
from ..majorization import (
    check_horn,
    weak_log_majorization_slack,
    weak_majorization_slack,
)
from ..maps import SchurMap, apply_map, check_ando, check_unitary_factorization, unitary_factor
from ..norms import check_cauchy_schwarz
from ..results import CheckResult, combine
from ..spectral import HermitianMatrix, SpdMatrix, apply_scalar_function, fractional_power, singular_values
from .functionals import (
    geodesic_sum,
    log_det_root_g,
    log_functional_congruence,
    log_functional_geodesic,
    log_norm_of_g,
    log_power_mean_g,
    spectrum_for_g,
    to_geodesic,
    trace_functional,
)
from .instances import CongruenceInstance, GeodesicInstance

ALPHA_MIN = 1e-6


def _log_slack(name, lhs_log, rhs_log, tol, **details) -> CheckResult:
    """``lhs <= rhs`` given both as logs (``-inf`` allowed on either side)."""
    if lhs_log == -np.inf:
        slack = np.inf
    elif rhs_log == -np.inf:
        slack = -np.inf
    else:
        slack = rhs_log - lhs_log
    scale = max(1.0, *(abs(v) for v in (lhs_log, rhs_log) if np.isfinite(v)))
    details.update(lhs_log=float(lhs_log), rhs_log=float(rhs_log))
    return CheckResult(name, float(slack), tol * scale, details=details)


def _guard(value, where):
    if not np.isfinite(value):
        raise RangeError(f"non-finite functional value at {where}")
    return value


def check_midpoint_logconvex(log_f, s, t, tol: float = 1e-9) -> CheckResult:
    """``log f((s+t)/2) <= (log f(s) + log f(t)) / 2``.

    ``log_f`` returns the logarithm of the functional; the tolerance is
    scaled by ``max(1, |log f|)`` over the three points.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mid = (s + t) / 2
    ls = _guard(log_f(s), s)
    lt = _guard(log_f(t), t)
    lm = _guard(log_f(mid), mid)
    slack = (ls + lt) / 2 - lm
    scale = max(1.0, abs(ls), abs(lt), abs(lm))
    return CheckResult(
        "midpoint_logconvex", float(slack), tol * scale,
        witness={"s": s.tolist(), "t": t.tolist()},
        details={"log_f_s": ls, "log_f_t": lt, "log_f_mid": lm},
    )


def check_midpoint_convex(f, s, t, tol: float = 1e-8) -> CheckResult:
    """``f((s+t)/2) <= (f(s) + f(t)) / 2`` with absolute tolerance."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mid = (s + t) / 2
    fs, ft, fm = _guard(f(s), s), _guard(f(t), t), _guard(f(mid), mid)
    return CheckResult(
        "midpoint_convex", float((fs + ft) / 2 - fm), tol,
        witness={"s": s.tolist(), "t": t.tolist()},
        details={"f_s": fs, "f_t": ft, "f_mid": fm},
    )


def fd_hessian(f, x, h: float = 1e-3) -> np.ndarray:
    """Central-difference Hessian of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    k = x.size
    H = np.empty((k, k))
    f0 = f(x)
    E = np.eye(k) * h
    for i in range(k):
        H[i, i] = (f(x + E[i]) - 2 * f0 + f(x - E[i])) / h**2
        for j in range(i + 1, k):
            H[i, j] = H[j, i] = (
                f(x + E[i] + E[j]) - f(x + E[i] - E[j]) - f(x - E[i] + E[j]) + f(x - E[i] - E[j])
            ) / (4 * h**2)
    return H


def check_hessian_psd(f, x, h: float = 1e-3, tol: float = 1e-5) -> CheckResult:
    """Minimum eigenvalue of the finite-difference Hessian is ``>= -tol``."""
    H = fd_hessian(f, x, h)
    lam = np.linalg.eigvalsh(H)
    return CheckResult(
        "hessian_psd", float(lam[0]), tol,
        witness={"x": np.asarray(x, dtype=float).tolist(), "h": h},
        details={"min_eig": float(lam[0]), "max_eig": float(lam[-1])},
    )


def abstract_map(inst: CongruenceInstance):
    """``(s, t) -> Tr log(X* A^s X + Y* B^t Y)`` for a two-term congruence instance."""
    if inst.m != 2:
        raise PreconditionError("the two-variable trace-log map needs m = 2")
    phi = PhiFn(_identity())
    return lambda x: trace_functional(inst, phi, x)


def _identity():
    from ..geofn import Identity

    return Identity()


def check_bridge(inst: CongruenceInstance, t, tol: float = 1e-9) -> CheckResult:
    """Direct congruence functional equals the geodesic functional after the polar rewrite.

    ``slack = -|F_direct / F_geodesic - 1|``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    direct = log_functional_congruence(inst, t)
    via = log_functional_geodesic(to_geodesic(inst), t)
    rel = abs(np.expm1(direct - via))
    return CheckResult(
        "polar_bridge", -float(rel), tol,
        witness={"t": t.tolist()},
        details={"log_direct": direct, "log_geodesic": via},
    )


# -- corollaries -------------------------------------------------------------

def check_corollary_schur(Z, A, g, norm, tol: float = 1e-9) -> CheckResult:
    """``||g(Z o I)||^2 <= ||g(Z o A)|| ||g(Z o A^{-1})||``."""
    phi = Z if isinstance(Z, SchurMap) else SchurMap(Z)
    A = A if isinstance(A, SpdMatrix) else SpdMatrix(A)
    n = A.dim
    left = log_norm_of_g(apply_map(phi, np.eye(n)), g, norm, psd=True)
    r1 = log_norm_of_g(apply_map(phi, A), g, norm, psd=True)
    r2 = log_norm_of_g(apply_map(phi, fractional_power(A, -1)), g, norm, psd=True)
    return _log_slack("corollary_schur", 2 * left, r1 + r2, tol)


def check_corollary_congruence(inst: CongruenceInstance, tol: float = 1e-9) -> CheckResult:
    """``||g(sum X*X)||^2 <= ||g(sum X*AX)|| ||g(sum X*A^{-1}X)||``, via the functional at t = 0, 1, -1."""
    ones = np.ones(inst.m)
    left = log_functional_congruence(inst, 0 * ones)
    r1 = log_functional_congruence(inst, ones)
    r2 = log_functional_congruence(inst, -ones)
    return _log_slack("corollary_congruence", 2 * left, r1 + r2, tol)


def _psd_power(A, p: float) -> HermitianMatrix:
    A = A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)
    lam = A.eigenvalues
    if lam[-1] < -1e-9 * max(abs(lam[0]), 1e-300):
        raise DomainError(f"matrix is not positive semidefinite: lambda_min={lam[-1]:.3e}")
    return apply_scalar_function(A, lambda x: np.clip(x, 0.0, None) ** p)


def _conjugate(p: float) -> float:
    if not p > 1:
        raise PreconditionError(f"exponent p must be > 1, got {p}")
    return p / (p - 1.0)


def check_corollary_weighted_power(As, weights, p, g, norm, tol: float = 1e-9) -> CheckResult:
    """``||g(sum w_i A_i)|| <= ||g(I)||^{1/q} ||g(sum w_i A_i^p)||^{1/p}``."""
    q = _conjugate(p)
    w = np.asarray(weights, dtype=float)
    if len(As) != w.size or np.any(w <= 0):
        raise PreconditionError("need one positive weight per matrix")
    if abs(w.sum() - 1.0) > 1e-12:
        raise PreconditionError(f"weights must sum to 1, got {w.sum()!r}")
    As = [A if isinstance(A, HermitianMatrix) else HermitianMatrix(A) for A in As]
    n = As[0].dim
    lhs = log_norm_of_g(HermitianMatrix(sum(wi * A.data for wi, A in zip(w, As))), g, norm, psd=True)
    r_id = log_norm_of_g(HermitianMatrix(np.eye(n)), g, norm)
    r_p = log_norm_of_g(HermitianMatrix(sum(wi * _psd_power(A, p).data for wi, A in zip(w, As))),
                        g, norm, psd=True)
    return _log_slack("corollary_weighted_power", lhs, r_id / q + r_p / p, tol)


def holder_log_sides(As, Bs, p, g, norm):
    """Log of both sides of the Hölder inequality.

    The left side uses ``|sum A_i B_i|``, which is ``sum A_i B_i`` itself for
    commuting pairs and stays defined (unlike ``g`` of a non-Hermitian
    matrix) when the pairs do not commute.
    """
    q = _conjugate(p)
    P = sum(A.data @ B.data for A, B in zip(As, Bs))
    lhs = log_norm_of_g(HermitianMatrix(np.diag(singular_values(P))), g, norm, psd=True)
    ra = log_norm_of_g(HermitianMatrix(sum(_psd_power(A, p).data for A in As)), g, norm, psd=True)
    rb = log_norm_of_g(HermitianMatrix(sum(_psd_power(B, q).data for B in Bs)), g, norm, psd=True)
    return lhs, ra / p + rb / q


def check_corollary_holder(As, Bs, p, g, norm, tol: float = 1e-9) -> CheckResult:
    """``||g(sum A_i B_i)|| <= ||g(sum A_i^p)||^{1/p} ||g(sum B_i^q)||^{1/q}`` for commuting pairs."""
    As = [A if isinstance(A, HermitianMatrix) else HermitianMatrix(A) for A in As]
    Bs = [B if isinstance(B, HermitianMatrix) else HermitianMatrix(B) for B in Bs]
    if len(As) != len(Bs) or not As:
        raise PreconditionError("need equally many A_i and B_i, at least one")
    worst = max(commutator_residual(A.data, B.data) for A, B in zip(As, Bs))
    if worst > COMMUTE_TOL:
        raise CommutationError(f"pairs do not commute: residual {worst:.3e}", residual=worst)
    lhs, rhs = holder_log_sides(As, Bs, p, g, norm)
    return _log_slack("corollary_holder", lhs, rhs, tol, commutator_residual=worst)


def check_det_limit(g, inst: GeodesicInstance, alphas, s, t, tol: float = 1e-9) -> CheckResult:
    """Power means ``(n^-1 Tr g^a)^{1/a}`` approach ``det^{1/n} g`` as ``a`` decreases.

    Sub-checks: the gap to the determinant root is nonincreasing along
    ``alphas`` at ``M = sum A_i #_{s_i} B_i``; the power-mean functional
    is midpoint log-convex for each ``alpha``; and so is the determinant
    root itself.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(np.diff(alphas) >= 0) or np.any(alphas <= 0):
        raise PreconditionError("alpha sequence must be positive and strictly decreasing")
    if alphas[-1] < ALPHA_MIN:
        raise RangeError(f"alpha {alphas[-1]:g} is below the floor {ALPHA_MIN:g}")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    M = geodesic_sum(inst, s)
    det_root = log_det_root_g(M, g)
    gaps = np.array([log_power_mean_g(M, g, a) - det_root for a in alphas])
    scale = max(1.0, abs(det_root))
    parts = []
    for i in range(gaps.size - 1):
        parts.append(CheckResult(f"gap_decrease_{i}", float(gaps[i] - gaps[i + 1]), tol * scale))
    parts.append(CheckResult("gap_nonnegative", float(gaps.min()), tol * scale))
    for a in alphas:
        r = check_midpoint_logconvex(lambda x, a=a: log_power_mean_g(geodesic_sum(inst, x), g, a), s, t, tol)
        r.name = f"power_mean_logconvex_{a:g}"
        parts.append(r)
    r = check_midpoint_logconvex(lambda x: log_det_root_g(geodesic_sum(inst, x), g), s, t, tol)
    r.name = "det_root_logconvex"
    parts.append(r)
    res = combine("det_limit", parts, witness={"s": s.tolist(), "t": t.tolist(), "alphas": alphas.tolist()})
    res.details.update({f"gap_{a:g}": float(v) for a, v in zip(alphas, gaps)})
    return res


# -- proof chain -------------------------------------------------------------

def proof_chain(phi, A, B, g, norm, tol: float = 1e-9) -> dict:
    """Each intermediate step of the single-variable argument, checked separately.

    Steps: Ando's inequality; unitarity of ``V`` in
    ``Phi(A) # Phi(B) = Phi(A)^{1/2} V Phi(B)^{1/2}``; Horn's inequality for
    that product; the resulting weak log-majorization
    ``Phi(A#B) <_wlog Phi(A)^{1/2 down} Phi(B)^{1/2 down}``; its transfer through
    ``g`` to weak majorization, first of ``g`` of the ordered product and then
    of ``g(Phi(A))^{1/2 down} g(Phi(B))^{1/2 down}``; Cauchy-Schwarz for the norm;
    and the end-to-end midpoint inequality.
    """
    PA, PB = SpdMatrix(apply_map(phi, A)), SpdMatrix(apply_map(phi, B))
    PAB = apply_map(phi, geomean(A, B))
    out = {}
    out["ando"] = check_ando(phi, A, B, tol)
    out["unitary_factorization"] = check_unitary_factorization(phi, A, B, tol)

    sa = fractional_power(PA, 0.5)
    sb = fractional_power(PB, 0.5)
    V = unitary_factor(PA, PB)
    out["horn"] = check_horn(sa.data, V @ sb.data, tol)

    a = PA.eigenvalues
    b = PB.eigenvalues
    prod_down = np.sqrt(a) * np.sqrt(b)
    out["weak_log_majorization"] = CheckResult(
        "weak_log_majorization", weak_log_majorization_slack(PAB, np.sort(prod_down)[::-1]), tol
    )

    lam = spectrum_for_g(PAB)
    lg_left = g.log_eval(lam)
    lg_prod = g.log_eval(prod_down)
    lg_half = (g.log_eval(a) + g.log_eval(b)) / 2
    shift = max(np.max(lg_left), np.max(lg_prod), np.max(lg_half))
    transfer = weak_majorization_slack(np.exp(lg_left - shift), np.exp(lg_prod - shift))
    geo = weak_majorization_slack(np.exp(lg_prod - shift), np.exp(lg_half - shift))
    out["monotone_convex_transfer"] = combine("monotone_convex_transfer", [
        CheckResult("g_of_wlog", transfer, tol),
        CheckResult("geo_convex_entrywise", geo, tol),
    ])

    ga = np.exp(g.log_eval(a) - shift)
    gb = np.exp(g.log_eval(b) - shift)
    out["cauchy_schwarz"] = check_cauchy_schwarz(norm, np.diag(ga), np.diag(gb), tol)

    end = check_midpoint_logconvex(
        lambda x: log_norm_of_g(apply_map(phi, weighted_geomean(A, B, x[0])), g, norm),
        [0.0], [1.0], tol,
    )
    end.name = "end_to_end"
    out["end_to_end"] = end
    return out


def check_proof_chain(phi, A, B, g, norm, tol: float = 1e-9) -> CheckResult:
    steps = proof_chain(phi, A, B, g, norm, tol)
    return combine("proof_chain", steps.values())
