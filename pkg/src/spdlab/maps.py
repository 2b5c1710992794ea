"""Positive linear maps between matrix algebras.

Spec strings (CLI/config)::

    id:n | tr:n | schur:<file> | comp:<file> | csum:<file>,<file>,... | bsum(<inner>, m)

Files hold matrices in the matrix JSON format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, DimensionError, DomainError, SpecSyntaxError
from .geometry import geomean
from .results import CheckResult
from .spectral import (
    EPS_PD,
    HermitianMatrix,
    SpdMatrix,
    matrix_from_json,
    matrix_to_json,
    opnorm,
    random_spd,
    random_unitary,
    sqrt_and_invsqrt,
)


class PosMap:
    in_dim: int
    out_dim: int

    def __call__(self, A) -> HermitianMatrix:
        return apply_map(self, A)

    def _apply(self, A: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityMap(PosMap):
    n: int

    @property
    def in_dim(self):
        return self.n

    out_dim = in_dim

    def _apply(self, A):
        return A

    def to_dict(self):
        return {"type": "id", "n": self.n}

    def spec(self):
        return f"id:{self.n}"


@dataclass(frozen=True)
class TraceMap(PosMap):
    """``A -> Tr A`` as a 1x1 matrix."""

    n: int

    @property
    def in_dim(self):
        return self.n

    out_dim = 1

    def _apply(self, A):
        return np.array([[np.trace(A)]])

    def to_dict(self):
        return {"type": "tr", "n": self.n}

    def spec(self):
        return f"tr:{self.n}"


@dataclass(frozen=True, eq=False)
class SchurMap(PosMap):
    """Schur multiplier ``A -> Z o A``; ``Z`` must be positive semidefinite."""

    Z: np.ndarray

    def __post_init__(self):
        H = HermitianMatrix(self.Z)
        lam = H.eigenvalues
        if lam[-1] < -H.dim * EPS_PD * max(abs(lam[0]), 1e-300):
            raise DomainError(f"Schur multiplier is not PSD: lambda_min={lam[-1]:.3e}")
        object.__setattr__(self, "Z", H.data)

    @property
    def in_dim(self):
        return self.Z.shape[0]

    out_dim = in_dim

    def _apply(self, A):
        return self.Z * A

    def to_dict(self):
        return {"type": "schur", "Z": matrix_to_json(self.Z)}


@dataclass(frozen=True, eq=False)
class CongruenceSumMap(PosMap):
    """``A -> sum_i X_i* A X_i`` with each ``X_i`` of shape ``n x d``."""

    Xs: tuple

    def __post_init__(self):
        Xs = tuple(np.asarray(X, dtype=complex) for X in self.Xs)
        if not Xs or any(X.shape != Xs[0].shape or X.ndim != 2 for X in Xs):
            raise DimensionError("congruence terms must be non-empty and share one shape")
        for X in Xs:
            X.setflags(write=False)
        object.__setattr__(self, "Xs", Xs)

    @property
    def in_dim(self):
        return self.Xs[0].shape[0]

    @property
    def out_dim(self):
        return self.Xs[0].shape[1]

    def _apply(self, A):
        return sum(X.conj().T @ A @ X for X in self.Xs)

    def to_dict(self):
        return {"type": "csum", "Xs": [matrix_to_json(X) for X in self.Xs]}


@dataclass(frozen=True, eq=False)
class CompressionMap(PosMap):
    """``A -> V* A V`` for ``V`` with orthonormal columns (``n x d``)."""

    V: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=complex)
        if V.ndim != 2 or V.shape[1] > V.shape[0]:
            raise DimensionError(f"compression needs an n x d isometry with d <= n, got {V.shape}")
        err = opnorm(V.conj().T @ V - np.eye(V.shape[1]))
        if err > 1e-10:
            raise DomainError(f"compression columns are not orthonormal (error {err:.3e})")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def in_dim(self):
        return self.V.shape[0]

    @property
    def out_dim(self):
        return self.V.shape[1]

    def _apply(self, A):
        return self.V.conj().T @ A @ self.V

    def to_dict(self):
        return {"type": "comp", "V": matrix_to_json(self.V)}


@dataclass(frozen=True, eq=False)
class BlockSumMap(PosMap):
    """``[A_ij] -> inner(sum_i A_ii)`` on ``m x m`` block matrices."""

    inner: PosMap
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DimensionError("block count must be >= 1")

    @property
    def in_dim(self):
        return self.m * self.inner.in_dim

    @property
    def out_dim(self):
        return self.inner.out_dim

    def _apply(self, A):
        n = self.inner.in_dim
        diag_sum = sum(A[i * n:(i + 1) * n, i * n:(i + 1) * n] for i in range(self.m))
        return self.inner._apply(diag_sum)

    def to_dict(self):
        return {"type": "bsum", "inner": self.inner.to_dict(), "m": self.m}


def apply_map(phi: PosMap, A) -> HermitianMatrix:
    """Apply ``phi`` to a Hermitian matrix of matching dimension."""
    A = A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)
    if A.dim != phi.in_dim:
        raise DimensionError(f"map expects dimension {phi.in_dim}, got {A.dim}")
    return HermitianMatrix(phi._apply(A.data))


def map_from_dict(d: dict) -> PosMap:
    kind = d["type"]
    if kind == "id":
        return IdentityMap(int(d["n"]))
    if kind == "tr":
        return TraceMap(int(d["n"]))
    if kind == "schur":
        return SchurMap(matrix_from_json(d["Z"]))
    if kind == "csum":
        return CongruenceSumMap(tuple(matrix_from_json(x) for x in d["Xs"]))
    if kind == "comp":
        return CompressionMap(matrix_from_json(d["V"]))
    if kind == "bsum":
        return BlockSumMap(map_from_dict(d["inner"]), int(d["m"]))
    raise SpecSyntaxError(f"unknown map type {kind!r}")


def _load_matrix(path: str) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def parse_map(text: str) -> PosMap:
    """Parse a map spec string; file arguments are read from disk."""
    text = text.strip()
    if text.startswith("bsum(") and text.endswith(")"):
        body = text[5:-1]
        inner, sep, m = body.rpartition(",")
        if not sep:
            raise SpecSyntaxError(f"bsum needs '(inner, m)': {text!r}")
        try:
            return BlockSumMap(parse_map(inner), int(m))
        except ValueError:
            raise SpecSyntaxError(f"bad block count in {text!r}") from None
    head, sep, arg = text.partition(":")
    if not sep or not arg:
        raise SpecSyntaxError(f"bad map spec {text!r}")
    if head in ("id", "tr"):
        try:
            n = int(arg)
        except ValueError:
            raise SpecSyntaxError(f"bad dimension in {text!r}") from None
        return IdentityMap(n) if head == "id" else TraceMap(n)
    if head == "schur":
        return SchurMap(_load_matrix(arg))
    if head == "comp":
        return CompressionMap(_load_matrix(arg))
    if head == "csum":
        return CongruenceSumMap(tuple(_load_matrix(p) for p in arg.split(",")))
    raise SpecSyntaxError(f"unknown map spec {text!r}")


# -- random maps -------------------------------------------------------------

VARIANTS = ("id", "schur", "csum", "comp", "tr", "bsum")


def random_map(variant: str, n: int, rng: np.random.Generator, real: bool = False) -> PosMap:
    """Seeded random map of the given variant with input dimension ``n``.

    For ``bsum`` the input dimension is ``2n`` (two blocks, identity inside).
    """
    if variant == "id":
        return IdentityMap(n)
    if variant == "tr":
        return TraceMap(n)
    if variant == "schur":
        # low-rank Z keeps the multiplier away from a scaled identity
        r = int(rng.integers(1, n + 1))
        G = rng.standard_normal((n, r)) + (0 if real else 1j * rng.standard_normal((n, r)))
        Z = G @ G.conj().T + 0.1 * np.eye(n)
        return SchurMap(Z)
    if variant == "comp":
        d = int(rng.integers(1, n + 1))
        return CompressionMap(random_unitary(n, rng, real=real)[:, :d])
    if variant == "csum":
        d = int(rng.integers(1, n + 1))
        r = int(rng.integers(1, 4))
        Xs = []
        for _ in range(r):
            X = rng.standard_normal((n, d)) + (0 if real else 1j * rng.standard_normal((n, d)))
            Xs.append(X / np.sqrt(n))
        return CongruenceSumMap(tuple(Xs))
    if variant == "bsum":
        return BlockSumMap(IdentityMap(n), 2)
    raise SpecSyntaxError(f"unknown map variant {variant!r}")


# -- checks ------------------------------------------------------------------

def _random_psd(n, rng, trial):
    if trial % 2:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return np.outer(v, v.conj())
    return random_spd(n, rng, 10.0 ** rng.uniform(0, 3)).data


def check_positivity(phi, trials: int = 100, seed: int = 0, tol: float = 1e-10) -> CheckResult:
    """Smallest eigenvalue of ``phi(A)`` over seeded PSD samples, relative to ``||phi(A)||``.

    Samples alternate between full-rank and rank-one matrices.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst = (np.inf, -1)
    for k in range(trials):
        A = _random_psd(phi.in_dim, rng, k)
        out = HermitianMatrix(phi._apply(A))
        lam = out.eigenvalues
        scale = max(abs(lam[0]), abs(lam[-1]), 1e-300)
        s = lam[-1] / scale
        if s < worst[0]:
            worst = (float(s), k)
    return CheckResult("positivity", worst[0], tol, witness={"seed": seed, "trial": worst[1]})


def _pd_image(phi, A, label) -> SpdMatrix:
    try:
        return SpdMatrix(apply_map(phi, A))
    except DegeneracyError as exc:
        raise DegeneracyError(f"map image of {label} is degenerate: {exc}") from exc


def check_ando(phi: PosMap, A, B, tol: float = 1e-9) -> CheckResult:
    """``phi(A # B) <= phi(A) # phi(B)`` in the Loewner order."""
    PA, PB = _pd_image(phi, A, "A"), _pd_image(phi, B, "B")
    lhs = apply_map(phi, geomean(A, B))
    rhs = geomean(PA, PB)
    gap = HermitianMatrix(rhs.data - lhs.data).eigenvalues
    scale = max(rhs.eigenvalues[0], 1e-300)
    return CheckResult("ando", float(gap[-1] / scale), tol, details={"min_gap": float(gap[-1])})


def unitary_factor(PA: SpdMatrix, PB: SpdMatrix) -> np.ndarray:
    """``V`` with ``PA # PB = PA^{1/2} V PB^{1/2}``."""
    _, ia = sqrt_and_invsqrt(PA)
    _, ib = sqrt_and_invsqrt(PB)
    return ia @ geomean(PA, PB).data @ ib


def check_unitary_factorization(phi: PosMap, A, B, tol: float = 1e-9) -> CheckResult:
    """The factor ``V`` of ``phi(A) # phi(B)`` is unitary: ``||V*V - I||_op <= tol``."""
    PA, PB = _pd_image(phi, A, "A"), _pd_image(phi, B, "B")
    V = unitary_factor(PA, PB)
    err = opnorm(V.conj().T @ V - np.eye(V.shape[0]))
    return CheckResult("unitary_factorization", -err, tol, details={"unitarity_error": err})
