"""Test instances for the verification lab and their JSON form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, SpecSyntaxError
from ..geofn import GeoFn, RawFunction, parse_fn
from ..geometry import _check_invertible
from ..maps import VARIANTS, BlockSumMap, IdentityMap, PosMap, map_from_dict, parse_map, random_map
from ..norms import NormSpec
from ..spectral import SpdMatrix, matrix_from_json, matrix_to_json, random_spd, random_unitary

STRUCTURES = ("generic", "commuting", "schur", "compression")


def _fn(g) -> GeoFn | RawFunction:
    return parse_fn(g) if isinstance(g, str) else g


def _norm(norm) -> NormSpec:
    return NormSpec.parse(norm) if isinstance(norm, str) else norm


@dataclass(frozen=True, eq=False)
class GeodesicInstance:
    """Pairs ``(A_i, B_i)`` plus the map, function and norm of ``||g(Phi(sum A_i #_{t_i} B_i))||``."""

    pairs: tuple
    map: PosMap
    g: GeoFn
    norm: NormSpec

    def __post_init__(self):
        pairs = tuple((_spd(A), _spd(B)) for A, B in self.pairs)
        if not pairs:
            raise DimensionError("an instance needs m >= 1 pairs")
        n = pairs[0][0].dim
        if any(A.dim != n or B.dim != n for A, B in pairs):
            raise DimensionError("all matrices in an instance must share one dimension")
        if self.map.in_dim != n:
            raise DimensionError(f"map input dimension {self.map.in_dim} != {n}")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "g", _fn(self.g))
        object.__setattr__(self, "norm", _norm(self.norm))

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return self.pairs[0][0].dim

    def to_dict(self) -> dict:
        return {
            "kind": "geodesic",
            "pairs": [[matrix_to_json(A), matrix_to_json(B)] for A, B in self.pairs],
            "map": self.map.to_dict(),
            "g": self.g.spec(),
            "norm": str(self.norm),
        }


@dataclass(frozen=True, eq=False)
class CongruenceInstance:
    """Terms ``(A_i, X_i)`` of ``||g(Phi(sum X_i* A_i^{t_i} X_i))||``."""

    terms: tuple
    map: PosMap
    g: GeoFn
    norm: NormSpec

    def __post_init__(self):
        terms = []
        for A, X in self.terms:
            A = _spd(A)
            X = np.asarray(X, dtype=complex)
            if X.shape != (A.dim, A.dim):
                raise DimensionError(f"X has shape {X.shape}, expected {(A.dim, A.dim)}")
            _check_invertible(X)
            X.setflags(write=False)
            terms.append((A, X))
        if not terms:
            raise DimensionError("an instance needs m >= 1 terms")
        n = terms[0][0].dim
        if any(A.dim != n for A, _ in terms):
            raise DimensionError("all matrices in an instance must share one dimension")
        if self.map.in_dim != n:
            raise DimensionError(f"map input dimension {self.map.in_dim} != {n}")
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "g", _fn(self.g))
        object.__setattr__(self, "norm", _norm(self.norm))

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def n(self) -> int:
        return self.terms[0][0].dim

    def to_dict(self) -> dict:
        return {
            "kind": "congruence",
            "terms": [[matrix_to_json(A), matrix_to_json(X)] for A, X in self.terms],
            "map": self.map.to_dict(),
            "g": self.g.spec(),
            "norm": str(self.norm),
        }


def _spd(A) -> SpdMatrix:
    return A if isinstance(A, SpdMatrix) else SpdMatrix(A)


def instance_from_dict(d: dict):
    phi = map_from_dict(d["map"])
    if d["kind"] == "geodesic":
        pairs = [(matrix_from_json(a), matrix_from_json(b)) for a, b in d["pairs"]]
        return GeodesicInstance(tuple(pairs), phi, d["g"], d["norm"])
    if d["kind"] == "congruence":
        terms = [(matrix_from_json(a), matrix_from_json(x)) for a, x in d["terms"]]
        return CongruenceInstance(tuple(terms), phi, d["g"], d["norm"])
    raise SpecSyntaxError(f"unknown instance kind {d['kind']!r}")


def make_rng(seed, *extra) -> np.random.Generator:
    """Generator keyed on ``(seed, *extra)``; independent streams per key."""
    key = [int(seed) % 2**64] + [int(e) % 2**64 for e in extra]
    return np.random.default_rng(np.random.SeedSequence(key))


def commuting_family(count: int, n: int, rng, cond: float, real: bool = False, U=None):
    """``count`` positive definite matrices diagonal in one random eigenbasis ``U``."""
    if U is None:
        U = random_unitary(n, rng, real=real)
    half = 0.5 * np.log(cond)
    out = []
    for _ in range(count):
        if n == 1:
            logs = rng.uniform(-half, half, 1)
        else:
            logs = np.concatenate([[half, -half], rng.uniform(-half, half, n - 2)])
            rng.shuffle(logs)
        out.append(SpdMatrix((U * np.exp(logs)) @ U.conj().T))
    return out


def random_invertible(n: int, rng, cond: float = 10.0, real: bool = False) -> np.ndarray:
    """``U diag(s) W`` with log-uniform singular values spanning ``cond``."""
    U = random_unitary(n, rng, real=real)
    W = random_unitary(n, rng, real=real)
    half = 0.5 * np.log(cond)
    s = np.exp(rng.uniform(-half, half, n))
    return (U * s) @ W


def _resolve_map(map_, structure, n, rng, real):
    if isinstance(map_, PosMap):
        return map_
    if map_ is None:
        map_ = {"schur": "schur", "compression": "comp"}.get(structure, "id")
    if map_ in VARIANTS:
        if map_ == "bsum":
            inner = random_map(("id", "schur", "comp", "csum", "tr")[rng.integers(5)], n, rng, real)
            return BlockSumMap(inner, 2)
        return random_map(map_, n, rng, real)
    return parse_map(map_)


def random_instance(
    kind: str,
    m: int,
    n: int,
    seed,
    cond: float = 10.0,
    structure: str = "generic",
    *,
    map=None,
    g="pow:1",
    norm="tr",
    real: bool = False,
):
    """Seeded instance; deterministic in all arguments.

    ``structure`` picks the default map (``schur``/``compression`` give a
    random multiplier/compression, otherwise identity) and, for
    ``commuting``, draws every matrix in one eigenbasis. ``map`` may be a
    :class:`PosMap`, a variant name from :data:`spdlab.maps.VARIANTS` or
    a map spec string. A block-sum map with ``b`` blocks turns each pair
    into block-diagonal ``A_1 (+) ... (+) A_b`` matrices.
    """
    if m < 1 or n < 1:
        raise DimensionError("m and n must be >= 1")
    if structure not in STRUCTURES:
        raise SpecSyntaxError(f"unknown structure {structure!r}")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    phi = _resolve_map(map, structure, n, rng, real)
    blocks = phi.m if isinstance(phi, BlockSumMap) else 1
    if phi.in_dim != n * blocks:
        raise DimensionError(f"map input dimension {phi.in_dim} does not fit n={n}")

    basis = random_unitary(n, rng, real=real) if structure == "commuting" else None

    def draw(count):
        if basis is not None:
            return commuting_family(count, n, rng, cond, real, U=basis)
        return [random_spd(n, rng, cond, real=real) for _ in range(count)]

    def lift(mats):
        if blocks == 1:
            return mats[0]
        out = np.zeros((n * blocks, n * blocks), dtype=complex)
        for i, M in enumerate(mats):
            out[i * n:(i + 1) * n, i * n:(i + 1) * n] = M.data
        return SpdMatrix(out)

    if kind == "geodesic":
        pairs = []
        for _ in range(m):
            mats = draw(2 * blocks)
            pairs.append((lift(mats[0::2]), lift(mats[1::2])))
        return GeodesicInstance(tuple(pairs), phi, g, norm)
    if kind == "congruence":
        terms = []
        for _ in range(m):
            mats = draw(blocks)
            Xs = [random_invertible(n, rng, min(cond, 10.0), real) for _ in range(blocks)]
            X = np.zeros((n * blocks, n * blocks), dtype=complex)
            for i, Xi in enumerate(Xs):
                X[i * n:(i + 1) * n, i * n:(i + 1) * n] = Xi
            terms.append((lift(mats), X))
        return CongruenceInstance(tuple(terms), phi, g, norm)
    raise SpecSyntaxError(f"unknown instance kind {kind!r}")
