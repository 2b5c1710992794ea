"""Outcome of one inequality check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TINY = 1e-300


@dataclass
class CheckResult:
    """Signed margin of an inequality check.

    ``slack`` is the minimum over all sub-checks; negative means the
    inequality is violated. The check passes iff ``slack >= -tol_used``.
    """

    name: str
    slack: float
    tol_used: float
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.slack >= -self.tol_used)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "slack": _jsonable_float(self.slack),
            "tol_used": self.tol_used,
            "witness": self.witness,
            "details": {k: _jsonable_float(v) for k, v in self.details.items()},
        }


def _jsonable_float(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def combine(name: str, results, witness=None) -> CheckResult:
    """Fold sub-checks into one result; the worst normalized slack wins.

    Slacks are rescaled so that each sub-check's own tolerance maps to the
    returned ``tol_used`` (the smallest one involved).
    """
    results = list(results)
    tol = min(r.tol_used for r in results)
    worst = None
    for r in results:
        s = r.slack * (tol / r.tol_used) if r.tol_used > 0 else r.slack
        if worst is None or s < worst[0]:
            worst = (s, r)
    details = {r.name: r.slack for r in results}
    return CheckResult(name, worst[0], tol, witness or {}, details)


def rel_slack(lhs: float, rhs: float) -> float:
    """``(rhs - lhs)`` relative to the larger magnitude; for ``lhs <= rhs`` checks."""
    scale = max(abs(lhs), abs(rhs), TINY)
    return (rhs - lhs) / scale
