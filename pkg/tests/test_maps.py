import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spdlab.errors import DimensionError, DomainError, SpecSyntaxError
from spdlab.geometry import geomean
from spdlab.maps import (
    VARIANTS,
    BlockSumMap,
    CompressionMap,
    CongruenceSumMap,
    IdentityMap,
    SchurMap,
    TraceMap,
    apply_map,
    check_ando,
    check_positivity,
    check_unitary_factorization,
    map_from_dict,
    parse_map,
    random_map,
    unitary_factor,
)
from spdlab.spectral import SpdMatrix, matrix_to_json, random_hermitian, random_spd, random_unitary

from conftest import rel_err

seeds = st.integers(0, 2**32)


def _map(variant, seed, n=4):
    return random_map(variant, n, np.random.default_rng(seed))


def test_schur_examples(rng):
    G = rng.standard_normal((3, 3))
    Z = G @ G.T
    phi = SchurMap(Z)
    assert np.allclose(apply_map(phi, np.ones((3, 3))).data, Z)
    assert np.allclose(apply_map(phi, np.eye(3)).data, np.diag(np.diag(Z)))


def test_schur_rejects_indefinite():
    with pytest.raises(DomainError):
        SchurMap(np.diag([1.0, -1.0]))


def test_block_sum_of_block_diagonal():
    A1, A2 = random_spd(3, 1).data, random_spd(3, 2).data
    M = np.zeros((6, 6), dtype=complex)
    M[:3, :3], M[3:, 3:] = A1, A2
    assert rel_err(apply_map(BlockSumMap(IdentityMap(3), 2), M).data, A1 + A2) < 1e-15


def test_trace_map_is_one_by_one():
    out = apply_map(TraceMap(3), np.diag([1.0, 2.0, 3.0]))
    assert out.dim == 1 and out.data[0, 0] == 6


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_map(IdentityMap(3), np.eye(2))


def test_compression_requires_isometry():
    with pytest.raises(DomainError):
        CompressionMap(np.array([[1.0], [1.0]]))
    with pytest.raises(DimensionError):
        CompressionMap(np.ones((2, 3)))


@pytest.mark.parametrize("variant", VARIANTS)
@given(seed=seeds)
def test_linearity(variant, seed):
    phi = _map(variant, seed)
    rng = np.random.default_rng(seed + 1)
    A = random_hermitian(phi.in_dim, rng).data
    B = random_hermitian(phi.in_dim, rng).data
    a, b = rng.standard_normal(2)
    lhs = apply_map(phi, a * A + b * B).data
    rhs = a * apply_map(phi, A).data + b * apply_map(phi, B).data
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(rhs))


@pytest.mark.parametrize("variant", VARIANTS)
def test_positivity_of_every_variant(variant):
    assert check_positivity(_map(variant, 3), trials=50, seed=1).passed


def test_positivity_identity_and_schur():
    assert check_positivity(IdentityMap(4), 20).passed
    assert check_positivity(_map("schur", 9), 50).passed


def test_positivity_fails_for_indefinite_multiplier():
    class RawSchur:
        in_dim = 3

        def _apply(self, A):
            return np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]) * A

    assert not check_positivity(RawSchur(), trials=40, seed=0).passed


@pytest.mark.parametrize("variant", VARIANTS)
def test_dict_round_trip(variant):
    phi = _map(variant, 4)
    phi2 = map_from_dict(json.loads(json.dumps(phi.to_dict())))
    A = random_hermitian(phi.in_dim, 5)
    assert np.array_equal(apply_map(phi, A).data, apply_map(phi2, A).data)


def test_parse_map(tmp_path):
    assert parse_map("id:3") == IdentityMap(3)
    assert parse_map("tr:4") == TraceMap(4)
    Z = np.eye(2) + 0.5
    (tmp_path / "z.json").write_text(json.dumps(matrix_to_json(Z)))
    V = random_unitary(3, 1)[:, :2]
    (tmp_path / "v.json").write_text(json.dumps(matrix_to_json(V)))
    assert np.allclose(parse_map(f"schur:{tmp_path / 'z.json'}").Z, Z)
    assert parse_map(f"comp:{tmp_path / 'v.json'}").out_dim == 2
    cs = parse_map(f"csum:{tmp_path / 'v.json'},{tmp_path / 'v.json'}")
    assert isinstance(cs, CongruenceSumMap) and len(cs.Xs) == 2
    b = parse_map("bsum(id:2, 3)")
    assert b.in_dim == 6 and b.out_dim == 2
    for bad in ["", "id", "id:x", "foo:1", "bsum(id:2)"]:
        with pytest.raises(SpecSyntaxError):
            parse_map(bad)


# -- Ando and the unitary factor ----------------------------------------------------

def test_ando_identity_equality():
    A, B = random_spd(4, 1), random_spd(4, 2)
    assert abs(check_ando(IdentityMap(4), A, B).slack) < 1e-10


def test_ando_trace_arithmetic():
    A, B = np.diag([1.0, 4.0]), np.diag([9.0, 1.0])
    assert np.trace(geomean(A, B).data).real == pytest.approx(5.0)
    r = check_ando(TraceMap(2), A, B)
    assert r.passed and r.slack > 0
    # Tr(A#B) = 5 against sqrt(Tr A Tr B) = sqrt(50)
    assert r.details["min_gap"] == pytest.approx(np.sqrt(50.0) - 5.0, rel=1e-12)


@given(seed=seeds)
def test_ando_random_compression(seed):
    rng = np.random.default_rng(seed)
    phi = random_map("comp", 5, rng)
    assert check_ando(phi, random_spd(5, rng), random_spd(5, rng)).passed


def test_unitary_factor_trivial_cases():
    A = random_spd(3, 4)
    assert rel_err(unitary_factor(A, A), np.eye(3)) < 1e-12
    V = unitary_factor(SpdMatrix(np.diag([1.0, 5.0, 2.0])), SpdMatrix(np.diag([3.0, 0.5, 2.0])))
    assert rel_err(V, np.eye(3)) < 1e-12


@pytest.mark.parametrize("variant", VARIANTS)
def test_unitary_factorization_random(variant):
    rng = np.random.default_rng(17)
    phi = random_map(variant, 4, rng)
    A, B = random_spd(phi.in_dim, rng), random_spd(phi.in_dim, rng)
    assert check_unitary_factorization(phi, A, B).slack >= -1e-9
