"""Unitarily invariant norms evaluated through singular values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError, SpecSyntaxError
from .results import CheckResult, rel_slack
from .spectral import HermitianMatrix, singular_values

SCHATTEN_MAX_P = 64.0
_KINDS = ("op", "tr", "fro", "sp", "kf")


@dataclass(frozen=True)
class NormSpec:
    """A symmetric norm: ``op``, ``tr``, ``fro``, ``sp`` (Schatten p) or ``kf`` (Ky Fan k)."""

    kind: str
    param: float | int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SpecSyntaxError(f"unknown norm kind {self.kind!r}")
        if self.kind == "sp" and not (self.param is not None and self.param >= 1):
            raise SpecSyntaxError(f"Schatten exponent must be >= 1, got {self.param}")
        if self.kind == "kf" and not (isinstance(self.param, int) and self.param >= 1):
            raise SpecSyntaxError(f"Ky Fan index must be an integer >= 1, got {self.param}")

    def __str__(self):
        if self.kind == "sp":
            return f"sp:{self.param:g}"
        if self.kind == "kf":
            return f"kf:{self.param}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> NormSpec:
        text = text.strip()
        head, _, arg = text.partition(":")
        if head in ("op", "tr", "fro"):
            if arg:
                raise SpecSyntaxError(f"norm {head!r} takes no argument")
            return cls(head)
        if head == "sp":
            try:
                return cls("sp", float(arg))
            except ValueError:
                raise SpecSyntaxError(f"bad Schatten exponent in {text!r}") from None
        if head == "kf":
            try:
                return cls("kf", int(arg))
            except ValueError:
                raise SpecSyntaxError(f"bad Ky Fan index in {text!r}") from None
        raise SpecSyntaxError(f"unknown norm spec {text!r}")


def _effective(norm: NormSpec, n: int) -> tuple[str, float]:
    if norm.kind == "kf" and norm.param > n:
        raise DimensionError(f"Ky Fan index {norm.param} exceeds dimension {n}")
    if norm.kind == "sp" and norm.param > SCHATTEN_MAX_P:
        return "op", 0.0
    return norm.kind, norm.param


def gauge(norm: NormSpec, sigma) -> float:
    """Symmetric gauge of a nonincreasing, nonnegative vector."""
    s = np.asarray(sigma, dtype=float)
    kind, p = _effective(norm, s.size)
    if kind == "op":
        return float(s[0])
    if kind == "tr":
        return float(s.sum())
    if kind == "fro":
        return float(np.sqrt(np.sum(s * s)))
    if kind == "kf":
        return float(s[:p].sum())
    top = s[0]
    if top == 0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def log_gauge(norm: NormSpec, log_sigma) -> float:
    """``log`` of :func:`gauge` from log singular values, without overflow.

    Entries may be ``-inf`` (zero singular values).
    """
    ls = np.sort(np.asarray(log_sigma, dtype=float))[::-1]
    kind, p = _effective(norm, ls.size)
    if kind == "op":
        return float(ls[0])
    if kind == "tr":
        return _logsumexp(ls)
    if kind == "kf":
        return _logsumexp(ls[:p])
    if kind == "fro":
        p = 2.0
    return _logsumexp(p * ls) / p


def _logsumexp(x) -> float:
    x = np.asarray(x, dtype=float)
    m = np.max(x)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(x - m))))


def evaluate(norm: NormSpec | str, M) -> float:
    """Value of ``norm`` at the square matrix ``M``.

    Hermitian inputs use ``|eigenvalues|``; other inputs go through the
    eigenvalues of ``M* M``.
    """
    if isinstance(norm, str):
        norm = NormSpec.parse(norm)
    if not isinstance(M, HermitianMatrix):
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"norm of a non-square array of shape {M.shape}")
    return gauge(norm, singular_values(M))


def _nonincreasing_diagonal(S, label) -> np.ndarray:
    S = np.asarray(S)
    d = np.real(np.diagonal(S)) if S.ndim == 2 else np.asarray(S, dtype=float)
    if S.ndim == 2 and np.any(S - np.diag(np.diagonal(S))):
        raise PreconditionError(f"{label} is not diagonal")
    if np.any(d < 0):
        raise PreconditionError(f"{label} has negative diagonal entries")
    if np.any(np.diff(d) > 0):
        raise PreconditionError(f"{label} diagonal is not nonincreasing")
    return d


def check_cauchy_schwarz(norm: NormSpec | str, S, T, tol: float = 1e-9) -> CheckResult:
    """``||S^{1/2} T^{1/2}|| <= ||S||^{1/2} ||T||^{1/2}`` for ordered PSD diagonals."""
    if isinstance(norm, str):
        norm = NormSpec.parse(norm)
    s = _nonincreasing_diagonal(S, "S")
    t = _nonincreasing_diagonal(T, "T")
    if s.size != t.size:
        raise DimensionError("S and T differ in size")
    lhs = gauge(norm, np.sqrt(s) * np.sqrt(t))
    rhs = np.sqrt(gauge(norm, s) * gauge(norm, t))
    return CheckResult(
        "cauchy_schwarz", rel_slack(lhs, rhs), tol,
        details={"lhs": lhs, "rhs": float(rhs)},
    )
