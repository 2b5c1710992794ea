"""Nondecreasing geometrically convex scalar functions as expression trees.

A function ``g >= 0`` on ``(0, inf)`` is geometrically convex when
``g(sqrt(ab)) <= sqrt(g(a) g(b))``, i.e. ``u -> log g(e^u)`` is convex.
The atoms below have this property and the combinators preserve it, so
every tree built from them is a valid ``g``. Trees are evaluated in log
space (:meth:`GeoFn.log_eval`) so that ``sinh`` and ``exp`` of large
eigenvalues do not overflow.

String syntax::

    id | exp | sinh | pow:a | const:c
    sum(f, g, ...) | max(f, g, ...) | prod(f, g, ...)
    scale:c(f) | exp_of(f) | pow_of:a(f)
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError, SpecSyntaxError
from .results import CheckResult

LOG2 = float(np.log(2.0))


class GeoFn:
    """Base class of the expression tree."""

    def log_eval(self, t) -> np.ndarray:
        raise NotImplementedError

    def value(self, t) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.value(_arr(t))

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec()


def _fmt(x: float) -> str:
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def _arr(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Identity(GeoFn):
    def log_eval(self, t):
        with np.errstate(divide="ignore"):
            return np.log(_arr(t))

    def value(self, t):
        return _arr(t).copy()

    def spec(self):
        return "id"


@dataclass(frozen=True)
class Exp(GeoFn):
    def log_eval(self, t):
        return _arr(t).copy()

    def value(self, t):
        return np.exp(t)

    def spec(self):
        return "exp"


@dataclass(frozen=True)
class Sinh(GeoFn):
    def log_eval(self, t):
        t = _arr(t)
        small = t < 1.0
        with np.errstate(divide="ignore"):
            lo = np.log(np.sinh(np.where(small, t, 1.0)))
        big = np.where(small, 1.0, t)
        hi = big - LOG2 + np.log1p(-np.exp(-2.0 * big))
        return np.where(small, lo, hi)

    def value(self, t):
        return np.sinh(t)

    def spec(self):
        return "sinh"


@dataclass(frozen=True)
class Power(GeoFn):
    """``t**alpha``; ``alpha = 0`` is the constant 1, including at ``t = 0``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"power exponent must be >= 0, got {self.alpha}")

    def log_eval(self, t):
        t = _arr(t)
        if self.alpha == 0:
            return np.zeros_like(t)
        with np.errstate(divide="ignore"):
            return self.alpha * np.log(t)

    def value(self, t):
        return np.ones_like(t) if self.alpha == 0 else t ** self.alpha

    def spec(self):
        return f"pow:{_fmt(self.alpha)}"


@dataclass(frozen=True)
class Const(GeoFn):
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"constant must be > 0, got {self.c}")

    def log_eval(self, t):
        return np.full_like(_arr(t), np.log(self.c))

    def value(self, t):
        return np.full_like(t, self.c)

    def spec(self):
        return f"const:{_fmt(self.c)}"


@dataclass(frozen=True)
class Sum(GeoFn):
    terms: tuple

    def log_eval(self, t):
        return np.logaddexp.reduce([f.log_eval(t) for f in self.terms], axis=0)

    def value(self, t):
        return np.sum([f.value(t) for f in self.terms], axis=0)

    def spec(self):
        return "sum(" + ", ".join(f.spec() for f in self.terms) + ")"


@dataclass(frozen=True)
class Max(GeoFn):
    terms: tuple

    def log_eval(self, t):
        return np.max([f.log_eval(t) for f in self.terms], axis=0)

    def value(self, t):
        return np.max([f.value(t) for f in self.terms], axis=0)

    def spec(self):
        return "max(" + ", ".join(f.spec() for f in self.terms) + ")"


@dataclass(frozen=True)
class Product(GeoFn):
    terms: tuple

    def log_eval(self, t):
        return np.sum([f.log_eval(t) for f in self.terms], axis=0)

    def value(self, t):
        return np.prod([f.value(t) for f in self.terms], axis=0)

    def spec(self):
        return "prod(" + ", ".join(f.spec() for f in self.terms) + ")"


@dataclass(frozen=True)
class Scale(GeoFn):
    c: float
    f: GeoFn

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"scale factor must be > 0, got {self.c}")

    def log_eval(self, t):
        return np.log(self.c) + self.f.log_eval(t)

    def value(self, t):
        return self.c * self.f.value(t)

    def spec(self):
        return f"scale:{_fmt(self.c)}({self.f.spec()})"


@dataclass(frozen=True)
class ExpOf(GeoFn):
    """``e^{f(t)}``; its logarithm is ``f(t)`` itself."""

    f: GeoFn

    def log_eval(self, t):
        with np.errstate(over="ignore"):
            return np.exp(self.f.log_eval(t))

    def value(self, t):
        return np.exp(self.f.value(t))

    def spec(self):
        return f"exp_of({self.f.spec()})"


@dataclass(frozen=True)
class PowerOf(GeoFn):
    alpha: float
    f: GeoFn

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"outer exponent must be > 0, got {self.alpha}")

    def log_eval(self, t):
        return self.alpha * self.f.log_eval(t)

    def value(self, t):
        return self.f.value(t) ** self.alpha

    def spec(self):
        return f"pow_of:{_fmt(self.alpha)}({self.f.spec()})"


class RawFunction:
    """A plain positive function outside the algebra, for negative controls.

    Nothing about it is guaranteed; it only shares the evaluation interface.
    """

    TABLE = {
        "ratio": lambda t: t / (1.0 + t),
        "recip": lambda t: 1.0 / t,
    }

    def __init__(self, name: str):
        if name not in self.TABLE:
            raise SpecSyntaxError(f"unknown raw function {name!r}")
        self.name = name

    def __call__(self, t):
        with np.errstate(divide="ignore"):
            return self.TABLE[self.name](_arr(t))

    def log_eval(self, t):
        with np.errstate(divide="ignore"):
            return np.log(self(t))

    def spec(self):
        return f"raw:{self.name}"

    __str__ = spec

    def __eq__(self, other):
        return isinstance(other, RawFunction) and other.name == self.name

    def __hash__(self):
        return hash(("raw", self.name))


@dataclass(frozen=True)
class PhiFn:
    """``phi = log g``; nondecreasing with ``phi(e^u)`` convex."""

    underlying: GeoFn

    def __call__(self, t):
        return self.underlying.log_eval(t)

    def spec(self):
        return f"log({self.underlying.spec()})"


def eval_fn(g: GeoFn, t: float) -> float:
    """``g(t)`` for ``t > 0``; raises :class:`RangeError` on overflow."""
    if not t > 0:
        raise DomainError(f"evaluation point must be > 0, got {t}")
    with np.errstate(over="ignore", invalid="ignore"):
        v = float(g(t))
    if not np.isfinite(v):
        raise RangeError(f"{g.spec()} overflows at t={t}")
    return v


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_]+)(?::([-+0-9.eE]+))?\s*")
_ATOMS = {"id": Identity, "exp": Exp, "sinh": Sinh}
_VARIADIC = {"sum": Sum, "max": Max, "prod": Product}


def parse_fn(text: str) -> GeoFn:
    """Parse the string syntax; also accepts ``raw:<name>`` controls."""
    fn, pos = _parse(text, 0)
    if text[pos:].strip():
        raise SpecSyntaxError(f"trailing input in {text!r} at {pos}")
    return fn


def _parse(text, pos):
    m = _TOKEN.match(text, pos)
    if not m:
        raise SpecSyntaxError(f"expected a function at position {pos} of {text!r}")
    name, arg = m.group(1), m.group(2)
    pos = m.end()
    if name == "raw":
        rm = re.compile(r"\s*:\s*([a-z]+)\s*").match(text, m.start(1) + 3)
        if not rm:
            raise SpecSyntaxError(f"bad raw function in {text!r}")
        return RawFunction(rm.group(1)), rm.end()
    try:
        val = float(arg) if arg is not None else None
    except ValueError:
        raise SpecSyntaxError(f"bad number {arg!r} in {text!r}") from None
    if name in _ATOMS:
        return _ATOMS[name](), pos
    if name == "pow":
        return Power(_need(val, name, text)), pos
    if name == "const":
        return Const(_need(val, name, text)), pos
    if not text.startswith("(", pos):
        raise SpecSyntaxError(f"{name!r} needs parenthesized arguments in {text!r}")
    args, pos = _parse_args(text, pos + 1)
    if name in _VARIADIC:
        if not args:
            raise SpecSyntaxError(f"{name} needs at least one argument")
        return _VARIADIC[name](tuple(args)), pos
    if len(args) != 1:
        raise SpecSyntaxError(f"{name} takes exactly one argument")
    if name == "scale":
        return Scale(_need(val, name, text), args[0]), pos
    if name == "pow_of":
        return PowerOf(_need(val, name, text), args[0]), pos
    if name == "exp_of":
        return ExpOf(args[0]), pos
    raise SpecSyntaxError(f"unknown function {name!r} in {text!r}")


def _need(val, name, text):
    if val is None:
        raise SpecSyntaxError(f"{name} needs a numeric argument in {text!r}")
    return val


def _parse_args(text, pos):
    args = []
    while True:
        fn, pos = _parse(text, pos)
        args.append(fn)
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            raise SpecSyntaxError(f"unbalanced parentheses in {text!r}")
        if text[pos] == ",":
            pos += 1
            continue
        if text[pos] == ")":
            return args, pos + 1
        raise SpecSyntaxError(f"unexpected {text[pos]!r} at {pos} in {text!r}")


#: the function bank exercised by the verification suites
BANK = ("pow:2", "sinh", "max(const:2, scale:3(pow:2))", "sum(pow:1, pow:3)")


def random_tree(rng: np.random.Generator, depth: int = 4) -> GeoFn:
    """Random valid tree; ``exp_of`` only wraps polynomially growing subtrees."""
    return _tree(rng, depth, tame=False)


def _tree(rng, depth, tame):
    if depth <= 1 or rng.random() < 0.3:
        choices = ["pow", "const", "id"] if tame else ["pow", "const", "id", "sinh", "exp"]
        kind = choices[rng.integers(len(choices))]
        if kind == "pow":
            return Power(float(np.round(rng.uniform(0, 3), 2)))
        if kind == "const":
            return Const(float(np.round(rng.uniform(0.1, 3), 2)))
        return {"id": Identity, "sinh": Sinh, "exp": Exp}[kind]()
    combos = ["sum", "max", "prod", "scale", "pow_of"] + ([] if tame else ["exp_of"])
    kind = combos[rng.integers(len(combos))]
    if kind in _VARIADIC:
        k = int(rng.integers(2, 4))
        return _VARIADIC[kind](tuple(_tree(rng, depth - 1, tame) for _ in range(k)))
    if kind == "scale":
        return Scale(float(np.round(rng.uniform(0.1, 3), 2)), _tree(rng, depth - 1, tame))
    if kind == "pow_of":
        return PowerOf(float(np.round(rng.uniform(0.2, 2.5), 2)), _tree(rng, depth - 1, tame))
    return ExpOf(_tree(rng, depth - 1, tame=True))


# -- numerical certification ---------------------------------------------------

def log_uniform_pairs(count: int = 200, seed: int = 0, lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=(count, 2)))


def _log_of(g, t):
    if hasattr(g, "log_eval"):
        return np.asarray(g.log_eval(t), dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(g(_arr(t)), dtype=float))


def check_geo_convex(g, grid=None, tol: float = 1e-11) -> CheckResult:
    """``g(sqrt(ab)) <= sqrt(g(a) g(b))`` on every pair of ``grid``.

    Compared in log form, each pair's slack scaled by
    ``max(1, |log g|)`` over the three values involved.
    """
    pairs = log_uniform_pairs() if grid is None else np.asarray(grid, dtype=float)
    a, b = pairs[:, 0], pairs[:, 1]
    if np.any(pairs <= 0):
        raise DomainError("grid points must be > 0")
    la, lb, lm = _log_of(g, a), _log_of(g, b), _log_of(g, np.sqrt(a * b))
    vals = np.stack([la, lb, lm])
    if not np.all(np.isfinite(vals)):
        raise RangeError(f"{_name(g)} is not finite and positive on the grid")
    scale = np.maximum(1.0, np.max(np.abs(vals), axis=0))
    slack = ((la + lb) / 2 - lm) / scale
    i = int(np.argmin(slack))
    return CheckResult(
        "geo_convex", float(slack[i]), tol,
        witness={"g": _name(g), "a": float(a[i]), "b": float(b[i])},
    )


def check_nondecreasing(g, grid=None, tol: float = 1e-11) -> CheckResult:
    pts = np.sort(log_uniform_pairs().ravel() if grid is None else np.ravel(grid).astype(float))
    if np.any(pts <= 0):
        raise DomainError("grid points must be > 0")
    lv = _log_of(g, pts)
    if not np.all(np.isfinite(lv)):
        raise RangeError(f"{_name(g)} is not finite and positive on the grid")
    scale = np.maximum(1.0, np.maximum(np.abs(lv[:-1]), np.abs(lv[1:])))
    slack = (lv[1:] - lv[:-1]) / scale
    if slack.size == 0:
        return CheckResult("nondecreasing", 0.0, tol, witness={"g": _name(g)})
    i = int(np.argmin(slack))
    return CheckResult(
        "nondecreasing", float(slack[i]), tol,
        witness={"g": _name(g), "a": float(pts[i]), "b": float(pts[i + 1])},
    )


def _name(g) -> str:
    return g.spec() if hasattr(g, "spec") else getattr(g, "__name__", repr(g))
