"""Scalar convex building blocks and normal contractions.

Every edge energy of a network is a symmetric convex function
``w: R -> [0, inf]`` with ``w(0) = 0``.  Three constructive families are
provided:

``ScaledPower(c, p)``
    ``w(t) = (c / p) |t|**p`` with ``p >= 1``.
``CoshMinusOne(c)``
    ``w(t) = c (cosh t - 1)``; smooth, not homogeneous, used wherever a
    non-homogeneous example is needed.
``Capped(inner, cap)``
    ``inner`` restricted to ``|t| <= cap`` and ``+inf`` outside, which is the
    simplest way to get energies that take the value infinity.

Normal contractions are 1-Lipschitz maps ``C: R -> R`` with ``C(0) = 0``.
All objects are immutable and evaluate elementwise on numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConstructionError, DomainBoundary, ParseError

__all__ = [
    "ScaledPower", "CoshMinusOne", "Capped", "ScalarConvex",
    "Identity", "Negate", "MinWith", "FoldAt", "PiecewiseLinear", "NormalContraction",
    "eval_scalar", "scalar_subdifferential", "scalar_conjugate", "numeric_conjugate",
    "apply_contraction", "scalar_from_dict", "contraction_from_dict",
    "random_piecewise_linear",
]


@dataclass(frozen=True)
class ScaledPower:
    c: float
    p: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ConstructionError(f"power coefficient must be finite and >= 0, got {self.c}")
        if not (self.p >= 1 and math.isfinite(self.p)):
            raise ConstructionError(f"power exponent must be >= 1, got {self.p}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (self.c / self.p) * np.abs(t) ** self.p

    def subdifferential(self, t: float) -> tuple[float, float]:
        if self.p == 1:
            if t == 0:
                return (-self.c, self.c)
            g = self.c * math.copysign(1.0, t)
            return (g, g)
        g = self.c * abs(t) ** (self.p - 1) * math.copysign(1.0, t)
        return (g, g)

    def conjugate(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        if self.c == 0:
            return np.where(s == 0, 0.0, np.inf)
        if self.p == 1:
            return np.where(s <= self.c, 0.0, np.inf)
        q = self.dual_exponent
        return self.c ** (1 - q) * s ** q / q

    @property
    def dual_exponent(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1)

    def conjugate_function(self) -> "ScaledPower":
        """The conjugate as another ``ScaledPower`` (only for ``p > 1``, ``c > 0``)."""
        if self.p == 1 or self.c == 0:
            raise ValueError("conjugate is an indicator, not a power")
        q = self.dual_exponent
        return ScaledPower(self.c ** (1 - q), q)

    @property
    def exponent(self) -> float | None:
        return self.p

    def is_zero(self) -> bool:
        return self.c == 0

    def to_dict(self) -> dict:
        return {"kind": "power", "c": float(self.c), "p": float(self.p)}


@dataclass(frozen=True)
class CoshMinusOne:
    """``c * (cosh(t) - 1)``: our pick of a smooth energy that is not homogeneous."""

    c: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ConstructionError(f"cosh coefficient must be finite and >= 0, got {self.c}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            # cosh(t) - 1 = 2 sinh(t/2)^2 keeps precision near 0
            return self.c * 2.0 * np.sinh(t / 2.0) ** 2

    def subdifferential(self, t: float) -> tuple[float, float]:
        g = self.c * math.sinh(t)
        return (g, g)

    def conjugate(self, s):
        s = np.asarray(s, dtype=float)
        if self.c == 0:
            return np.where(s == 0, 0.0, np.inf)
        u = np.abs(s) / self.c
        return self.c * (u * np.arcsinh(u) - np.sqrt(1.0 + u * u) + 1.0)

    @property
    def exponent(self) -> float | None:
        return None

    def is_zero(self) -> bool:
        return self.c == 0

    def to_dict(self) -> dict:
        return {"kind": "cosh", "c": float(self.c)}


@dataclass(frozen=True)
class Capped:
    inner: "ScalarConvex"
    cap: float

    def __post_init__(self):
        if not (self.cap > 0):
            raise ConstructionError(f"cap must be > 0, got {self.cap}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= self.cap
        with np.errstate(over="ignore", invalid="ignore"):
            vals = self.inner(np.where(inside, t, 0.0))
        return np.where(inside, vals, np.inf)

    def subdifferential(self, t: float) -> tuple[float, float]:
        if abs(t) >= self.cap:
            raise DomainBoundary(f"|t| = {abs(t)} is not inside the cap {self.cap}")
        return self.inner.subdifferential(t)

    def conjugate(self, s):
        s = np.asarray(s, dtype=float)
        out = np.array([numeric_conjugate(self, float(v), self.cap) for v in s.ravel()])
        return out.reshape(s.shape)

    @property
    def exponent(self) -> float | None:
        return None

    def is_zero(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"kind": "capped", "inner": self.inner.to_dict(), "cap": float(self.cap)}


ScalarConvex = Union[ScaledPower, CoshMinusOne, Capped]


def numeric_conjugate(w, s: float, radius: float) -> float:
    """``sup_{|t| <= radius} (s t - w(t))`` by bounded 1-D maximization.

    ``w`` must be symmetric and convex, so the search is restricted to
    ``t`` with the sign of ``s``.
    """
    a = abs(s)
    if a == 0:
        return 0.0

    def neg(t):
        v = float(w(t))
        return -(a * t - v) if math.isfinite(v) else math.inf

    res = minimize_scalar(neg, bounds=(0.0, radius), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, radius)})
    best = max(-res.fun, 0.0)
    edge = float(w(radius))
    if math.isfinite(edge):
        best = max(best, a * radius - edge)
    return best


def eval_scalar(w: ScalarConvex, t: float) -> float:
    return float(w(t))


def scalar_subdifferential(w: ScalarConvex, t: float) -> tuple[float, float]:
    """Closed interval ``[lo, hi]`` equal to the subdifferential of ``w`` at ``t``."""
    return w.subdifferential(float(t))


def scalar_conjugate(w: ScalarConvex, s: float) -> float:
    return float(w.conjugate(float(s)))


def scalar_from_dict(d, path: str = "w") -> ScalarConvex:
    if not isinstance(d, dict) or "kind" not in d:
        raise ParseError("expected an object with a 'kind' key", field=path)
    kind = d["kind"]
    try:
        if kind == "power":
            return ScaledPower(float(d["c"]), float(d["p"]))
        if kind == "cosh":
            return CoshMinusOne(float(d["c"]))
        if kind == "capped":
            return Capped(scalar_from_dict(d["inner"], path + ".inner"), float(d["cap"]))
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", field=path) from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), field=path) from None
    raise ParseError(f"unknown scalar kind {kind!r}", field=path + ".kind")


# --- normal contractions ---------------------------------------------------

@dataclass(frozen=True)
class Identity:
    def __call__(self, t):
        return np.asarray(t, dtype=float)

    def to_dict(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class Negate:
    def __call__(self, t):
        return -np.asarray(t, dtype=float)

    def to_dict(self):
        return {"kind": "negate"}


@dataclass(frozen=True)
class MinWith:
    """``t -> min(t, alpha)``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConstructionError(f"alpha must be > 0, got {self.alpha}")

    def __call__(self, t):
        return np.minimum(np.asarray(t, dtype=float), self.alpha)

    def to_dict(self):
        return {"kind": "min", "alpha": float(self.alpha)}


@dataclass(frozen=True)
class FoldAt:
    """``t -> |t - beta| - |beta|``."""

    beta: float

    def __call__(self, t):
        return np.abs(np.asarray(t, dtype=float) - self.beta) - abs(self.beta)

    def to_dict(self):
        return {"kind": "fold", "beta": float(self.beta)}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise linear map with ``C(0) = 0``.

    ``slopes[k]`` is the slope on the k-th interval cut out by the sorted
    ``breakpoints`` (so there is one more slope than breakpoints).  The map
    is anchored at the origin.
    """

    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]
    _anchor_values: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _shift: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b = tuple(float(x) for x in self.breakpoints)
        s = tuple(float(x) for x in self.slopes)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "slopes", s)
        if len(s) != len(b) + 1:
            raise ConstructionError("need exactly one more slope than breakpoints")
        if any(y <= x for x, y in zip(b, b[1:])):
            raise ConstructionError("breakpoints must be strictly increasing")
        if any(not abs(x) <= 1.0 for x in s):
            raise ConstructionError(f"slopes must satisfy |slope| <= 1, got {s}")
        # antiderivative F with F(b[0]) = 0, shifted afterwards so that C(0) = 0
        anchors = [0.0]
        for i in range(1, len(b)):
            anchors.append(anchors[-1] + s[i] * (b[i] - b[i - 1]))
        object.__setattr__(self, "_anchor_values", tuple(anchors))
        object.__setattr__(self, "_shift", float(self._raw(np.array(0.0))))

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        s = np.asarray(self.slopes)
        if not self.breakpoints:
            return s[0] * t
        b = np.asarray(self.breakpoints)
        k = np.searchsorted(b, t, side="right")
        a = np.maximum(k - 1, 0)
        return np.asarray(self._anchor_values)[a] + s[k] * (t - b[a])

    def __call__(self, t):
        return self._raw(t) - self._shift

    @classmethod
    def from_points(cls, xs, ys) -> "PiecewiseLinear":
        """Interpolate through ``(xs, ys)``, extending the end segments linearly.

        Raises ``ConstructionError`` unless the interpolant vanishes at 0 and
        every segment has slope at most 1 in modulus.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size < 2 or xs.shape != ys.shape:
            raise ConstructionError("need at least two points of matching shape")
        order = np.argsort(xs)
        xs, ys = xs[order], ys[order]
        slopes = np.diff(ys) / np.diff(xs)
        C = cls(tuple(xs), (slopes[0], *slopes, slopes[-1]))
        if abs(float(C(xs[0])) - ys[0]) > 1e-12 * (1.0 + abs(ys[0])):
            raise ConstructionError("piecewise linear contraction must vanish at 0")
        return C

    def to_dict(self):
        return {"kind": "piecewise", "breakpoints": list(self.breakpoints),
                "slopes": list(self.slopes)}


NormalContraction = Union[Identity, Negate, MinWith, FoldAt, PiecewiseLinear]


def apply_contraction(C: NormalContraction, f):
    return C(np.asarray(f, dtype=float))


def random_piecewise_linear(rng: np.random.Generator, max_breaks: int = 4,
                            span: float = 3.0) -> PiecewiseLinear:
    k = int(rng.integers(0, max_breaks + 1))
    b = np.sort(rng.uniform(-span, span, size=k))
    b = b[np.concatenate([[True], np.diff(b) > 1e-9])] if k else b
    return PiecewiseLinear(tuple(b), tuple(rng.uniform(-1.0, 1.0, size=b.size + 1)))


def contraction_from_dict(d, path: str = "contraction") -> NormalContraction:
    if not isinstance(d, dict) or "kind" not in d:
        raise ParseError("expected an object with a 'kind' key", field=path)
    kind = d["kind"]
    try:
        if kind == "identity":
            return Identity()
        if kind == "negate":
            return Negate()
        if kind == "min":
            return MinWith(float(d["alpha"]))
        if kind == "fold":
            return FoldAt(float(d["beta"]))
        if kind == "piecewise":
            return PiecewiseLinear(tuple(d["breakpoints"]), tuple(d["slopes"]))
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", field=path) from None
    raise ParseError(f"unknown contraction kind {kind!r}", field=path + ".kind")
