import json

import numpy as np
import pytest

from spdlab.errors import SpecSyntaxError
from spdlab.lab.suites import CONTROLS, SUITES, build_case, decode, encode, replay, search_counterexamples

NAMES = ["thm21", "thm12", "thm11", "cor13", "cor14", "cor15", "cor22", "cor23",
         "ando", "horn", "proofchain", "negative_controls"]


def test_registry():
    assert list(SUITES) == NAMES
    assert set(CONTROLS) == {"non_geo_convex_g", "decreasing_g", "indefinite_schur", "noncommuting_holder"}


@pytest.mark.parametrize("name", NAMES[:-1])
def test_suite_small_run_passes(name):
    r = search_counterexamples(name, 25, seed=3)
    assert r["passed"], r["worst_slacks"]
    assert r["errors"] == 0
    assert set(r) >= {"suite", "trials", "seed", "tol", "worst_slacks", "witnesses", "passed"}


@pytest.mark.parametrize("name", NAMES[:-1])
def test_replay_reproduces_slack(name):
    r = search_counterexamples(name, 5, seed=11, keep=2)
    for w in r["witnesses"]:
        again = replay(json.loads(json.dumps(w)))
        assert again.slack == w["slack"]


@pytest.mark.parametrize("name", ["thm21", "cor13", "proofchain"])
def test_codec_round_trip(name):
    case = build_case(name, 5, 2)
    enc = encode(case)
    assert json.dumps(encode(decode(json.loads(json.dumps(enc))))) == json.dumps(enc)


def test_report_independent_of_jobs():
    a = search_counterexamples("thm12", 12, seed=9, jobs=1)
    b = search_counterexamples("thm12", 12, seed=9, jobs=2)
    assert json.dumps(a) == json.dumps(b)


def test_worst_slacks_sorted():
    r = search_counterexamples("ando", 30, seed=1, keep=5)
    norm = [w["slack"] / w["tol_used"] for w in r["worst_slacks"]]
    assert norm == sorted(norm) and len(norm) == 5


def test_negative_controls_find_violations():
    r = search_counterexamples("negative_controls", 100, seed=42)
    assert r["passed"]
    for name, c in r["controls"].items():
        assert c["violations"] > 0, name
    for w in r["witnesses"]:
        assert not w["passed"]
        assert not replay(w).passed


def test_unknown_suite_and_bad_trials():
    with pytest.raises(SpecSyntaxError):
        search_counterexamples("bogus", 1)
    with pytest.raises(SpecSyntaxError):
        search_counterexamples("thm21", 0)


def test_tol_override_is_recorded():
    r = search_counterexamples("horn", 3, seed=0, tol=1e-6)
    assert r["tol"] == 1e-6 and all(w["tol"] == 1e-6 for w in r["witnesses"])


def test_encode_handles_numpy_scalars():
    assert encode({"a": np.float64(1.5), "b": np.int64(3), "c": np.arange(2.0)}) == {"a": 1.5, "b": 3, "c": [0.0, 1.0]}


def test_cond_parameter_sets_tolerance_and_is_recorded():
    rep = search_counterexamples("cor22", 5, 3, cond=1e4, keep=1)
    assert rep["cond"] == 1e4 and rep["tol"] == 1e-8
    assert rep["witnesses"][0]["cond"] == 1e4
    assert search_counterexamples("thm21", 2, 3)["tol"] == 1e-9
    with pytest.raises(SpecSyntaxError):
        search_counterexamples("thm21", 2, 3, cond=0.5)
