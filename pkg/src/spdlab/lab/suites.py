"""Named verification suites and the seeded counterexample search.

A suite turns a generator into one random *case* per trial and evaluates
it to a :class:`~spdlab.results.CheckResult`. Trial ``k`` under master
seed ``s`` always draws from ``SeedSequence([s, k])``, so reports do not
depend on how trials are scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NUMERICAL_ERRORS, SpecSyntaxError
from ..geofn import BANK, GeoFn, PhiFn, RawFunction, parse_fn
from ..maps import VARIANTS, PosMap, SchurMap, check_ando, map_from_dict, random_map
from ..majorization import check_horn
from ..norms import NormSpec
from ..results import CheckResult, combine
from ..spectral import HermitianMatrix, matrix_from_json, matrix_to_json, random_spd
from .checks import (
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
    holder_log_sides,
    _log_slack,
)
from .functionals import log_functional_congruence, log_functional_geodesic, trace_functional
from .instances import (
    CongruenceInstance,
    GeodesicInstance,
    commuting_family,
    instance_from_dict,
    make_rng,
    random_instance,
    random_invertible,
)

NORMS = ("tr", "op", "kf:2", "sp:3")
BOX = 2.0
DET_ALPHAS = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625)
HOLDER_P = (1.5, 2.0, 3.0)
#: sampled condition numbers are log-uniform on [1, cond]
DEFAULT_COND = 10.0
ILL_COND = 1e3
ILL_COND_TOL = 1e-8


# -- case codec --------------------------------------------------------------

def encode(obj):
    """JSON-ready form of a case; inverse of :func:`decode`."""
    if isinstance(obj, (GeodesicInstance, CongruenceInstance)):
        return {"$instance": obj.to_dict()}
    if isinstance(obj, PosMap):
        return {"$map": obj.to_dict()}
    if isinstance(obj, (GeoFn, RawFunction)):
        return {"$fn": obj.spec()}
    if isinstance(obj, NormSpec):
        return {"$norm": str(obj)}
    if isinstance(obj, HermitianMatrix):
        return {"$matrix": matrix_to_json(obj.data)}
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return {"$matrix": matrix_to_json(obj)}
        return [encode(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {k: encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def decode(obj):
    if isinstance(obj, list):
        return [decode(x) for x in obj]
    if not isinstance(obj, dict):
        return obj
    if "$instance" in obj:
        return instance_from_dict(obj["$instance"])
    if "$map" in obj:
        return map_from_dict(obj["$map"])
    if "$fn" in obj:
        return parse_fn(obj["$fn"])
    if "$norm" in obj:
        return NormSpec.parse(obj["$norm"])
    if "$matrix" in obj:
        return matrix_from_json(obj["$matrix"])
    return {k: decode(v) for k, v in obj.items()}


# -- shared draws ------------------------------------------------------------

def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def _box(rng, m):
    return rng.uniform(-BOX, BOX, m)


def _cond(rng, cond):
    return float(10.0 ** rng.uniform(0.0, np.log10(cond)))


def _norm_for(norm: str, out_dim: int) -> str:
    # a Ky Fan index above the output size is undefined; cap it
    if norm.startswith("kf:") and int(norm[3:]) > out_dim:
        return f"kf:{out_dim}"
    return norm


def _convex_tol(tol):
    # plain (not log) convexity of a trace functional: absolute, one decade looser
    return max(1e-8, 10 * tol)


def _instance(rng, kind, cond, *, m_max=3, n_max=6, variant=None, g=None, norm=None, structure="generic"):
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(2, n_max + 1))
    variant = variant or _pick(rng, VARIANTS)
    if variant == "bsum":
        n = max(1, n // 2)
    g = g or _pick(rng, BANK)
    norm = norm or _pick(rng, NORMS)
    inst = random_instance(kind, m, n, rng, _cond(rng, cond), structure, map=variant, g=g, norm="op")
    norm = _norm_for(norm, inst.map.out_dim)
    if kind == "geodesic":
        return GeodesicInstance(inst.pairs, inst.map, g, norm)
    return CongruenceInstance(inst.terms, inst.map, g, norm)


# -- suites ------------------------------------------------------------------

@dataclass(frozen=True)
class Suite:
    name: str
    statement: str
    tol: float
    build: Callable
    evaluate: Callable


def _thm21_build(rng, cond):
    inst = _instance(rng, "geodesic", cond)
    return {"inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m)}


def _thm21_eval(case, tol):
    inst = case["inst"]
    return check_midpoint_logconvex(lambda x: log_functional_geodesic(inst, x), case["s"], case["t"], tol)


def _thm12_build(rng, cond):
    inst = _instance(rng, "congruence", cond)
    return {"inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m)}


def _thm12_eval(case, tol):
    inst = case["inst"]
    mid = check_midpoint_logconvex(lambda x: log_functional_congruence(inst, x), case["s"], case["t"], tol)
    bridge = check_bridge(inst, case["s"], tol)
    return combine("thm12", [mid, bridge], witness=mid.witness)


def _thm11_build(rng, cond):
    inst = _instance(rng, "congruence", cond, variant="id", norm="tr")
    hess = random_instance("congruence", 2, int(rng.integers(1, 5)), rng, _cond(rng, cond))
    return {
        "inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m),
        "hess": hess, "x": rng.uniform(-1.0, 1.0, 2),
    }


def _thm11_eval(case, tol):
    inst = case["inst"]
    phi = PhiFn(inst.g)
    mid = check_midpoint_convex(lambda x: trace_functional(inst, phi, x), case["s"], case["t"], _convex_tol(tol))
    hess = check_hessian_psd(abstract_map(case["hess"]), case["x"], h=1e-3, tol=1e-5)
    return combine("thm11", [mid, hess], witness=mid.witness)


def _cor13_build(rng, cond):
    n = int(rng.integers(1, 7))
    r = int(rng.integers(1, n + 1))
    G = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    return {
        "Z": G @ G.conj().T, "A": random_spd(n, rng, _cond(rng, cond)),
        "g": parse_fn(_pick(rng, BANK)), "norm": NormSpec.parse(_norm_for(_pick(rng, NORMS), n)),
    }


def _cor13_eval(case, tol):
    return check_corollary_schur(SchurMap(case["Z"]), case["A"], case["g"], case["norm"], tol)


def _cor14_build(rng, cond):
    return {"inst": _instance(rng, "congruence", cond, variant="id")}


def _cor14_eval(case, tol):
    return check_corollary_congruence(case["inst"], tol)


def _cor15_build(rng, cond):
    m = int(rng.integers(1, 4))
    n = int(rng.integers(1, 7))
    w = rng.dirichlet(np.ones(m))
    w[-1] = 1.0 - w[:-1].sum()
    return {
        "As": [random_spd(n, rng, _cond(rng, cond)) for _ in range(m)], "w": w,
        "p": float(_pick(rng, HOLDER_P + (float(rng.uniform(1.1, 4.0)),))),
        "g": parse_fn(_pick(rng, BANK)), "norm": NormSpec.parse(_norm_for(_pick(rng, NORMS), n)),
    }


def _cor15_eval(case, tol):
    return check_corollary_weighted_power(case["As"], case["w"], case["p"], case["g"], case["norm"], tol)


def _cor22_build(rng, cond):
    inst = _instance(rng, "geodesic", cond, variant="id", norm="tr")
    return {"inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m)}


def _cor22_eval(case, tol):
    inst = case["inst"]
    phi = PhiFn(inst.g)
    mid = check_midpoint_convex(lambda x: trace_functional(inst, phi, x), case["s"], case["t"], _convex_tol(tol))
    det = check_det_limit(inst.g, inst, DET_ALPHAS, case["s"], case["t"], tol)
    return combine("cor22", [mid, det], witness=mid.witness)


def _holder_case(rng, cond, n, g, norm):
    m = int(rng.integers(1, 4))
    fam = commuting_family(2 * m, n, rng, _cond(rng, cond))
    return {
        "As": fam[:m], "Bs": fam[m:], "p": float(_pick(rng, HOLDER_P)),
        "g": parse_fn(g), "norm": NormSpec.parse(_norm_for(norm, n)),
    }


def _cor23_build(rng, cond):
    n = int(rng.integers(1, 7))
    return _holder_case(rng, cond, n, _pick(rng, ("sinh",) + BANK), _pick(rng, NORMS))


def _cor23_eval(case, tol):
    return check_corollary_holder(case["As"], case["Bs"], case["p"], case["g"], case["norm"], tol)


def _pair_build(rng, cond):
    n = int(rng.integers(1, 7))
    variant = _pick(rng, VARIANTS)
    phi = random_map(variant, n, rng)
    dim = phi.in_dim
    return {"map": phi, "A": random_spd(dim, rng, _cond(rng, cond)), "B": random_spd(dim, rng, _cond(rng, cond))}


def _ando_eval(case, tol):
    return check_ando(case["map"], case["A"], case["B"], tol)


def _horn_build(rng, cond):
    n = int(rng.integers(1, 7))
    return {"S": random_invertible(n, rng, _cond(rng, cond)), "T": random_invertible(n, rng, _cond(rng, cond))}


def _horn_eval(case, tol):
    return check_horn(case["S"], case["T"], tol)


def _chain_build(rng, cond):
    case = _pair_build(rng, cond)
    case["g"] = parse_fn(_pick(rng, BANK))
    case["norm"] = NormSpec.parse(_norm_for(_pick(rng, NORMS), case["map"].out_dim))
    return case


def _chain_eval(case, tol):
    return check_proof_chain(case["map"], case["A"], case["B"], case["g"], case["norm"], tol)


# -- negative controls -------------------------------------------------------
#
# Each control drops one hypothesis and is expected to violate. A control's
# slack is the ordinary check slack, so "passed" there means "no violation".

def _ctl_geo_build(rng, cond):
    inst = _instance(rng, "geodesic", cond, m_max=2, n_max=3, g="raw:ratio", variant=_pick(rng, ("id", "comp", "tr")))
    return {"inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m)}


def _ctl_decreasing_build(rng, cond):
    inst = _instance(rng, "geodesic", cond, m_max=2, n_max=3, g="raw:recip", variant=_pick(rng, ("comp", "tr")))
    return {"inst": inst, "s": _box(rng, inst.m), "t": _box(rng, inst.m)}


def _ctl_schur_build(rng, cond):
    n = int(rng.integers(2, 6))
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Z = (G + G.conj().T) / 2
    if rng.integers(2):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        A = np.outer(v, v.conj())
    else:
        A = random_spd(n, rng, _cond(rng, cond)).data
    return {"Z": Z, "A": A}


def _ctl_schur_eval(case, tol):
    # the Hadamard product is taken directly: SchurMap refuses an indefinite Z
    out = HermitianMatrix(case["Z"] * case["A"])
    lam = out.eigenvalues
    scale = max(abs(lam[0]), abs(lam[-1]), 1e-300)
    return CheckResult("schur_positivity", float(lam[-1] / scale), tol)


def _near_projection(angle, eps, scale):
    v = np.array([np.cos(angle), np.sin(angle)])
    return scale * (np.outer(v, v) + eps * np.eye(2))


def _ctl_holder_build(rng, cond):
    # near rank-one pairs: B_1, B_2 along orthogonal axes, A_i tilted off B_i
    theta = rng.uniform(0.0, np.pi)
    eps = float(10.0 ** rng.uniform(-3.0, -1.0))
    c = float(np.exp(rng.uniform(-1.0, 1.0)))
    tilt = rng.uniform(-np.pi / 4, np.pi / 4, 2)
    Bs = [_near_projection(theta, eps, c), _near_projection(theta + np.pi / 2, eps, c)]
    As = [_near_projection(theta + tilt[0], eps, c), _near_projection(theta + np.pi / 2 + tilt[1], eps, c)]
    return {"As": As, "Bs": Bs, "p": float(_pick(rng, (3.0, 4.0, 6.0))),
            "g": parse_fn(_pick(rng, ("pow:1",) + BANK)), "norm": NormSpec.parse("op")}


def _ctl_holder_eval(case, tol):
    As = [HermitianMatrix(A) for A in case["As"]]
    Bs = [HermitianMatrix(B) for B in case["Bs"]]
    lhs, rhs = holder_log_sides(As, Bs, case["p"], case["g"], case["norm"])
    return _log_slack("noncommuting_holder", lhs, rhs, tol)


CONTROLS = {
    "non_geo_convex_g": (_ctl_geo_build, _thm21_eval),
    "decreasing_g": (_ctl_decreasing_build, _thm21_eval),
    "indefinite_schur": (_ctl_schur_build, _ctl_schur_eval),
    "noncommuting_holder": (_ctl_holder_build, _ctl_holder_eval),
}


SUITES = {
    s.name: s for s in (
        Suite("thm21", "midpoint log-convexity of ||g(Phi(sum A_i #_t_i B_i))||", 1e-9, _thm21_build, _thm21_eval),
        Suite("thm12", "log-convexity of ||g(Phi(sum X_i* A_i^t_i X_i))|| and the polar bridge",
              1e-9, _thm12_build, _thm12_eval),
        Suite("thm11", "convexity of Tr log g(sum X_i* A_i^t_i X_i); Hessian of the two-term trace-log map",
              1e-9, _thm11_build, _thm11_eval),
        Suite("cor13", "||g(Z o I)||^2 <= ||g(Z o A)|| ||g(Z o A^-1)||", 1e-9, _cor13_build, _cor13_eval),
        Suite("cor14", "||g(sum X*X)||^2 <= ||g(sum X*AX)|| ||g(sum X*A^-1 X)||", 1e-9, _cor14_build, _cor14_eval),
        Suite("cor15", "||g(sum w_i A_i)|| <= ||g(I)||^(1/q) ||g(sum w_i A_i^p)||^(1/p)",
              1e-9, _cor15_build, _cor15_eval),
        Suite("cor22", "convexity of Tr log g(sum A_i #_t_i B_i) and the determinant limit",
              1e-9, _cor22_build, _cor22_eval),
        Suite("cor23", "Hoelder for commuting pairs: ||g(sum A_i B_i)|| <= ||g(sum A^p)||^(1/p) ||g(sum B^q)||^(1/q)",
              1e-9, _cor23_build, _cor23_eval),
        Suite("ando", "Phi(A # B) <= Phi(A) # Phi(B)", 1e-9, _pair_build, _ando_eval),
        Suite("horn", "prod sigma_j(ST) <= prod sigma_j(S) sigma_j(T) for every prefix", 1e-9, _horn_build, _horn_eval),
        Suite("proofchain", "every intermediate step of the midpoint argument", 1e-9, _chain_build, _chain_eval),
        Suite("negative_controls", "dropping a hypothesis produces violations", 1e-9, None, None),
    )
}


def _build(name: str, rng, cond):
    if name in SUITES and name != "negative_controls":
        return SUITES[name].build(rng, cond)
    if name.startswith("control:") and name[8:] in CONTROLS:
        return CONTROLS[name[8:]][0](rng, cond)
    raise SpecSyntaxError(f"unknown suite {name!r}")


def _evaluate(name: str, case, tol):
    if name.startswith("control:"):
        return CONTROLS[name[8:]][1](case, tol)
    return SUITES[name].evaluate(case, tol)


def build_case(name: str, seed: int, trial: int, cond: float = DEFAULT_COND):
    """The case that trial ``trial`` of suite ``name`` under ``seed`` evaluates."""
    return _build(name, make_rng(seed, trial), cond)


def _run_trial(args):
    name, seed, trial, tol, cond = args
    try:
        r = _evaluate(name, build_case(name, seed, trial, cond), tol)
    except NUMERICAL_ERRORS as exc:
        return {"trial": trial, "error": f"{type(exc).__name__}: {exc}"}
    return {"trial": trial, "slack": r.slack, "tol_used": r.tol_used}


def _run_all(name, seed, trials, tol, jobs, cond):
    work = [(name, seed, k, tol, cond) for k in range(trials)]
    if jobs <= 1:
        return [_run_trial(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_trial, work, chunksize=max(1, trials // (4 * jobs))))


def _norm_slack(o):
    return o["slack"] / o["tol_used"] if o["tol_used"] > 0 else o["slack"]


def _witness(name, seed, trial, tol, cond, outcome):
    case = build_case(name, seed, trial, cond)
    return {
        "suite": name, "seed": seed, "trial": trial, "tol": tol, "cond": cond,
        "slack": outcome["slack"], "tol_used": outcome["tol_used"],
        "passed": outcome["slack"] >= -outcome["tol_used"],
        "case": encode(case),
    }


def _summarize(name, seed, trials, tol, cond, outcomes, keep):
    ok = [o for o in outcomes if "error" not in o]
    errs = [o for o in outcomes if "error" in o]
    ranked = sorted(ok, key=lambda o: (_norm_slack(o), o["trial"]))
    violations = [o for o in ok if o["slack"] < -o["tol_used"]]
    return {
        "worst_slacks": [
            {"trial": o["trial"], "slack": o["slack"], "tol_used": o["tol_used"]} for o in ranked[:keep]
        ],
        "witnesses": [_witness(name, seed, o["trial"], tol, cond, o) for o in ranked[:keep]],
        "violations": len(violations),
        "first_violation": min((o["trial"] for o in violations), default=None),
        "errors": len(errs),
        "error_samples": [f"trial {o['trial']}: {o['error']}" for o in errs[:3]],
    }


def search_counterexamples(suite: str, trials: int = 1000, seed: int = 0, tol: float | None = None,
                           jobs: int = 1, keep: int = 5, cond: float = DEFAULT_COND) -> dict:
    """Run ``suite`` over ``trials`` seeded cases and report the worst ones.

    ``passed`` is true when no trial violates (for ``negative_controls``:
    when every control violates at least once). Numerical failures are
    counted under ``errors``; a run with errors only fails if they
    outnumber the completed trials. ``cond`` caps the condition number of
    sampled matrices; at ``cond >= 1e3`` the default tolerance is 1e-8.
    """
    if trials < 1:
        raise SpecSyntaxError("trials must be >= 1")
    if suite not in SUITES:
        raise SpecSyntaxError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    if not cond >= 1:
        raise SpecSyntaxError("cond must be >= 1")
    if tol is None:
        tol = SUITES[suite].tol if cond < ILL_COND else ILL_COND_TOL
    tol, cond, seed = float(tol), float(cond), int(seed)
    report = {"suite": suite, "statement": SUITES[suite].statement, "trials": trials, "seed": seed,
              "tol": tol, "cond": cond}
    if suite == "negative_controls":
        controls = {}
        witnesses = []
        worst = []
        for i, name in enumerate(CONTROLS):
            sub = f"control:{name}"
            # each control gets its own stream under the master seed
            sub_seed = int(np.random.SeedSequence([seed, 1000003 + i]).generate_state(1, np.uint64)[0])
            outcomes = _run_all(sub, sub_seed, trials, tol, jobs, cond)
            summary = _summarize(sub, sub_seed, trials, tol, cond, outcomes, 1)
            controls[name] = {
                "seed": sub_seed, "violations": summary["violations"],
                "first_violation": summary["first_violation"], "errors": summary["errors"],
                "worst_slack": summary["worst_slacks"][0]["slack"] if summary["worst_slacks"] else None,
            }
            worst += summary["worst_slacks"]
            witnesses += summary["witnesses"]
        report.update(
            passed=all(c["violations"] > 0 for c in controls.values()),
            violations=sum(c["violations"] for c in controls.values()),
            errors=sum(c["errors"] for c in controls.values()),
            numerical_failure=False,
            controls=controls, worst_slacks=worst, witnesses=witnesses,
        )
        return report
    outcomes = _run_all(suite, seed, trials, tol, jobs, cond)
    summary = _summarize(suite, seed, trials, tol, cond, outcomes, keep)
    report.update(
        passed=summary["violations"] == 0 and summary["errors"] * 2 <= trials,
        numerical_failure=summary["errors"] * 2 > trials,
        **summary,
    )
    return report


def replay(witness: dict) -> CheckResult:
    """Re-evaluate a witness from a report without regenerating it."""
    case = decode(witness["case"])
    return _evaluate(witness["suite"], case, witness["tol"])
