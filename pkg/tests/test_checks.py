import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spdlab.errors import CommutationError, PreconditionError, RangeError
from spdlab.geofn import BANK, PhiFn, parse_fn
from spdlab.lab.checks import (
    abstract_map,
    check_bridge,
    check_corollary_congruence,
    check_corollary_holder,
    check_corollary_schur,
    check_corollary_weighted_power,
    check_det_limit,
    check_hessian_psd,
    check_midpoint_convex,
    check_midpoint_logconvex,
    check_proof_chain,
    fd_hessian,
    proof_chain,
)
from spdlab.lab.functionals import log_functional_geodesic, trace_functional
from spdlab.lab.instances import CongruenceInstance, commuting_family, random_instance
from spdlab.maps import VARIANTS, IdentityMap, SchurMap, random_map
from spdlab.norms import NormSpec
from spdlab.spectral import random_spd

seeds = st.integers(0, 2**32)
NORMS = ["tr", "op", "fro", "kf:2", "sp:3"]


# -- midpoint checks --------------------------------------------------------------

def test_midpoint_logconvex_trivial():
    inst = random_instance("geodesic", 2, 3, 1, g="sinh")
    f = lambda x: log_functional_geodesic(inst, x)
    assert check_midpoint_logconvex(f, [0.5, -1], [0.5, -1]).slack == 0
    scalar = random_instance("geodesic", 1, 1, 4, g="id", norm="tr")
    r = check_midpoint_logconvex(lambda x: log_functional_geodesic(scalar, x), [-2.0], [1.5])
    assert abs(r.slack) < 1e-14


@given(seed=seeds, s=st.lists(st.floats(-2, 2), min_size=2, max_size=2),
       t=st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_midpoint_logconvex_random(seed, s, t):
    inst = random_instance("geodesic", 2, 3, seed, map="csum", g="sinh", norm="sp:3")
    assert check_midpoint_logconvex(lambda x: log_functional_geodesic(inst, x), s, t).passed


def test_midpoint_convex_trivial_and_scalar_oracle():
    x, y, a, b = 0.8, 1.3, 4.0, 0.3
    inst = CongruenceInstance(((([[a]]), [[x]]), (([[b]]), [[y]])), IdentityMap(1), "id", "tr")
    f = lambda v: trace_functional(inst, PhiFn(parse_fn("id")), v)
    assert check_midpoint_convex(f, [1, 1], [1, 1]).slack == 0
    scal = lambda v: math.log(x * x * a ** v[0] + y * y * b ** v[1])
    for p in ([0.0, 0.0], [1.5, -1.0], [-2.0, 2.0]):
        H = fd_hessian(scal, p, 1e-4)
        assert np.linalg.eigvalsh(H)[0] >= -1e-6
        assert np.allclose(fd_hessian(f, p, 1e-4), H, atol=1e-6)
    assert check_midpoint_convex(f, [-2, 1], [1.5, -0.5]).passed


def test_hessian_of_abstract_map():
    inst = random_instance("congruence", 2, 3, 2)
    r = check_hessian_psd(abstract_map(inst), [0.3, -0.4])
    assert r.passed
    with pytest.raises(PreconditionError):
        abstract_map(random_instance("congruence", 3, 2, 0))


def test_fd_hessian_quadratic():
    H = fd_hessian(lambda x: x[0] ** 2 + 3 * x[0] * x[1] - x[1] ** 2, [0.2, 0.1])
    assert np.allclose(H, [[2, 3], [3, -2]], atol=1e-8)


def test_bridge_check():
    assert check_bridge(random_instance("congruence", 3, 4, 5, map="schur", g="sinh"), [0.1, -1, 2]).passed


# -- corollaries ----------------------------------------------------------------

def _psd(rng, n, r):
    G = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    return G @ G.conj().T


def test_schur_corollary_examples(rng):
    Z = _psd(rng, 4, 4)
    g, tr = parse_fn("sinh"), NormSpec.parse("tr")
    assert abs(check_corollary_schur(Z, np.eye(4), g, tr).slack) < 1e-12
    for text in BANK:
        assert check_corollary_schur(np.eye(4), random_spd(4, 3, 50.0), parse_fn(text), NormSpec.parse("op")).passed
    assert check_corollary_schur(SchurMap(_psd(rng, 4, 2)), random_spd(4, 5, 30.0), g, tr).passed


def test_congruence_corollary_examples(rng):
    X = [rng.standard_normal((3, 3)) for _ in range(2)]
    inst = CongruenceInstance(tuple((np.eye(3), x) for x in X), IdentityMap(3), "sinh", "tr")
    assert abs(check_corollary_congruence(inst).slack) < 1e-12
    single = CongruenceInstance(((random_spd(3, 1), np.eye(3)),), IdentityMap(3), "pow:2", "op")
    assert check_corollary_congruence(single).passed
    assert check_corollary_congruence(random_instance("congruence", 3, 4, 8, g="sinh", norm="kf:2")).passed


def test_weighted_power_examples():
    g, nm = parse_fn("sinh"), NormSpec.parse("tr")
    r = check_corollary_weighted_power([np.eye(3)] * 3, [0.2, 0.3, 0.5], 2.5, g, nm)
    assert abs(r.slack) < 1e-12
    # n = 1: g(a) <= g(1)^(1/q) g(a^p)^(1/p)
    a, p = 2.3, 3.0
    q = p / (p - 1)
    r = check_corollary_weighted_power([[[a]]], [1.0], p, g, nm)
    expected = math.log(math.sinh(1)) / q + math.log(math.sinh(a ** p)) / p - math.log(math.sinh(a))
    assert r.slack == pytest.approx(expected, rel=1e-12)
    rng = np.random.default_rng(4)
    As = [random_spd(4, rng, 20.0) for _ in range(3)]
    w = np.array([0.5, 0.25, 0.25])
    for text in NORMS:
        assert check_corollary_weighted_power(As, w, 3.0, g, NormSpec.parse(text)).passed


def test_weighted_power_preconditions():
    g, nm = parse_fn("id"), NormSpec.parse("tr")
    with pytest.raises(PreconditionError):
        check_corollary_weighted_power([np.eye(2)] * 2, [0.5, 0.6], 2.0, g, nm)
    with pytest.raises(PreconditionError):
        check_corollary_weighted_power([np.eye(2)], [1.0], 1.0, g, nm)
    with pytest.raises(PreconditionError):
        check_corollary_weighted_power([np.eye(2)] * 2, [1.5, -0.5], 2.0, g, nm)


def test_holder_b_identity():
    rng = np.random.default_rng(2)
    As = [random_spd(3, rng) for _ in range(3)]
    r = check_corollary_holder(As, [np.eye(3)] * 3, 2.0, parse_fn("sinh"), NormSpec.parse("tr"))
    assert r.passed


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 7.0])
def test_holder_scalar_is_classical(p):
    rng = np.random.default_rng(int(p * 10))
    a, b = rng.uniform(0.1, 3, 4), rng.uniform(0.1, 3, 4)
    q = p / (p - 1)
    r = check_corollary_holder([[[x]] for x in a], [[[y]] for y in b], p, parse_fn("id"), NormSpec.parse("tr"))
    lhs, rhs = np.sum(a * b), np.sum(a ** p) ** (1 / p) * np.sum(b ** q) ** (1 / q)
    assert r.slack == pytest.approx(math.log(rhs / lhs), abs=1e-13)
    eq = check_corollary_holder([[[x]] for x in a], [[[x ** (p - 1)]] for x in a], p,
                                parse_fn("id"), NormSpec.parse("tr"))
    assert abs(eq.slack) <= 1e-12


@pytest.mark.parametrize("norm", NORMS)
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_holder_sinh_commuting(norm, p):
    rng = np.random.default_rng(7)
    fam = commuting_family(6, 4, rng, 30.0)
    assert check_corollary_holder(fam[:3], fam[3:], p, parse_fn("sinh"), NormSpec.parse(norm)).passed


def test_holder_rejects_noncommuting_and_bad_p():
    A, B = random_spd(3, 1), random_spd(3, 2)
    g, nm = parse_fn("sinh"), NormSpec.parse("tr")
    with pytest.raises(CommutationError) as info:
        check_corollary_holder([A], [B], 2.0, g, nm)
    assert info.value.residual > 1e-10
    with pytest.raises(PreconditionError):
        check_corollary_holder([A], [A], 1.0, g, nm)


# -- determinant limit ----------------------------------------------------------------

ALPHAS = [1.0, 0.5, 0.25, 0.125, 0.0625]


def test_det_limit_random_and_scalar():
    inst = random_instance("geodesic", 2, 4, 3, g="sinh")
    r = check_det_limit(inst.g, inst, ALPHAS, [0.3, -1.2], [1.8, 0.4])
    assert r.passed
    gaps = [r.details[f"gap_{a:g}"] for a in ALPHAS]
    assert all(x >= y for x, y in zip(gaps, gaps[1:]))
    flat = random_instance("geodesic", 1, 1, 2, g="sinh")
    r = check_det_limit(flat.g, flat, ALPHAS, [0.1], [0.9])
    assert max(abs(flat_gap) for k, flat_gap in r.details.items() if k.startswith("gap_")) < 1e-12


def test_det_limit_preconditions():
    inst = random_instance("geodesic", 1, 2, 3)
    with pytest.raises(PreconditionError):
        check_det_limit(inst.g, inst, [0.5, 1.0], [0], [1])
    with pytest.raises(RangeError):
        check_det_limit(inst.g, inst, [1.0, 1e-8], [0], [1])


# -- proof chain -------------------------------------------------------------------

STEPS = {"ando", "unitary_factorization", "horn", "weak_log_majorization",
         "monotone_convex_transfer", "cauchy_schwarz", "end_to_end"}


@pytest.mark.parametrize("variant", VARIANTS)
def test_proof_chain_steps(variant):
    rng = np.random.default_rng(VARIANTS.index(variant))
    phi = random_map(variant, 3, rng)
    A, B = random_spd(phi.in_dim, rng, 30.0), random_spd(phi.in_dim, rng, 30.0)
    for text in BANK:
        steps = proof_chain(phi, A, B, parse_fn(text), NormSpec.parse("tr"))
        assert set(steps) == STEPS
        assert all(r.passed for r in steps.values()), {k: v.slack for k, v in steps.items()}
    assert check_proof_chain(phi, A, B, parse_fn("sinh"), NormSpec.parse("op")).passed
