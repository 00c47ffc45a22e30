"""Resistance quantities of a network form.

All values are extended nonnegative reals: ``math.inf`` is returned (never a
large sentinel) whenever the supremum is infinite.  Dual vectors ``phi`` act
on functions by ``<phi, f> = sum_c phi[c] f[c]`` over coordinate classes, so
``form.delta(x)`` is the point evaluation at ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq, minimize

from .errors import (
    DimensionMismatch, ReslabError, NonPositiveAlpha, NonPositiveT, TooLarge, UnknownVertex,
)
from .forms import NetworkForm
from .solvers import (
    DEFAULT_CONFIG, Penalty, SolveConfig, Status, level_crossing, minimize_composite,
    sup_linear_over_sublevel,
)

__all__ = [
    "elementary_resistance", "resistance_to_infinity", "t_resistance",
    "t_resistance_to_infinity", "conjugate", "conjugate_maximizer", "luxemburg", "orlicz",
    "approximating_form", "resistance_matrix", "ResistanceMatrix", "ORLICZ_MAX_CLASSES",
]

ORLICZ_MAX_CLASSES = 6


def _check_vector(form: NetworkForm, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (form.n,):
        raise DimensionMismatch(f"expected a vector of {form.n} coordinates, got {v.shape}")
    return v


def _check_t(t: float):
    if not t > 0:
        raise NonPositiveT(f"t must be > 0, got {t}")


def elementary_resistance(form: NetworkForm, x: str, y: str,
                          cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``R(x, y) = sup { f(x) - f(y) : E(f) <= 1 }``."""
    cx, cy = form.class_of(x), form.class_of(y)
    if cx == cy:
        return 0.0
    return sup_linear_over_sublevel(form, form.delta(x) - form.delta(y), cfg)


def resistance_to_infinity(form: NetworkForm, x: str,
                           cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``sup { f(x) : E(f) <= 1 }``."""
    return sup_linear_over_sublevel(form, form.delta(x), cfg)


def _negated_min(form, linear, cfg) -> float:
    out = minimize_composite(form, linear, (), cfg)
    if out.status is Status.UNBOUNDED:
        return math.inf
    return max(-out.value, 0.0)


def t_resistance(form: NetworkForm, x: str, y: str, t: float,
                 cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``sup_f { t (f(x) - f(y)) - E(f) }``."""
    _check_t(t)
    if form.class_of(x) == form.class_of(y):
        return 0.0
    return _negated_min(form, t * (form.delta(x) - form.delta(y)), cfg)


def t_resistance_to_infinity(form: NetworkForm, x: str, t: float,
                             cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``sup_f { t f(x) - E(f) }``; infinite at once if ``x`` lies in a flat set."""
    _check_t(t)
    return _negated_min(form, t * form.delta(x), cfg)


def conjugate(form: NetworkForm, phi, cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """Convex conjugate ``E*(phi) = sup_f { <phi, f> - E(f) }``."""
    return conjugate_maximizer(form, phi, cfg)[0]


def conjugate_maximizer(form: NetworkForm, phi, cfg: SolveConfig = DEFAULT_CONFIG):
    """``(E*(phi), f*)`` where ``f*`` attains the supremum (``None`` if infinite).

    ``f*`` is a subgradient of ``E*`` at ``phi``.
    """
    phi = _check_vector(form, phi)
    if not np.any(phi):
        return 0.0, np.zeros(form.n)
    out = minimize_composite(form, phi, (), cfg)
    if out.status is Status.UNBOUNDED or out.argopt is None:
        return math.inf, None
    return max(-out.value, 0.0), out.argopt


def luxemburg(form: NetworkForm, f, cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``inf { lam > 0 : E(f / lam) <= 1 }`` by bisection on ``lam``."""
    f = _check_vector(form, f)
    if not np.any(f):
        return 0.0

    def ok(lam):
        return form.evaluate(f / lam) <= 1.0

    lam = 1.0
    if ok(lam):
        hi = lam
        while True:
            lam /= 2.0
            if lam < cfg.tol_abs:
                return 0.0
            if not ok(lam):
                lo = lam
                break
            hi = lam
    else:
        lo = lam
        while True:
            lam *= 2.0
            if lam > cfg.divergence_norm_bound:
                return math.inf
            if ok(lam):
                hi = lam
                break
            lo = lam
    while hi - lo > cfg.tol_rel * hi + cfg.tol_abs:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def orlicz(form: NetworkForm, f, cfg: SolveConfig = DEFAULT_CONFIG,
           max_classes: int = ORLICZ_MAX_CLASSES) -> float:
    """``sup { <phi, f> : E*(phi) <= 1 }``.

    Root finding on ``m*(s) = min { E*(phi) : <phi, f> = s }``; every value
    of ``E*`` is a primal solve, and the inner minimization over ``phi``
    uses the primal maximizer as the gradient of ``E*``.  ``phi`` is kept
    orthogonal to the flat directions of ``E``, off which ``E*`` is infinite.

    Costly (hundreds of solves), hence refused above ``max_classes``
    coordinate classes.  Conjugates that are indicators (1-homogeneous
    terms) give the inner minimization nothing to descend on and are not
    supported reliably.
    """
    if form.n > max_classes:
        raise TooLarge(f"Orlicz functional limited to {max_classes} coordinate classes, "
                       f"form has {form.n}")
    f = _check_vector(form, f)
    if not np.any(f):
        return 0.0
    flats = form.flat_components()
    if flats:
        A = np.zeros((len(flats), form.n))
        for i, comp in enumerate(flats):
            A[i, comp] = 1.0
        S = null_space(A)
    else:
        S = np.eye(form.n)
    fs = S.T @ f
    norm2 = float(fs @ fs)
    if norm2 <= 1e-24 * max(1.0, float(f @ f)):
        return 0.0
    base = S @ (fs / norm2)
    N = S @ null_space(fs[None, :]) if S.shape[1] > 1 else np.zeros((form.n, 0))

    def h(y, s):
        val, fstar = conjugate_maximizer(form, s * base + N @ y, cfg)
        if not math.isfinite(val):
            return 1e300, np.zeros_like(y)
        return val, N.T @ fstar

    def m_star(s):
        if N.shape[1] == 0:
            return h(np.zeros(0), s)[0]
        res = minimize(h, N.T @ _ray_subgradient(form, f, s), args=(s,), jac=True,
                       method="BFGS", options={"gtol": 1e-5, "maxiter": 100})
        return math.inf if res.fun >= 1e300 else float(res.fun)

    return level_crossing(m_star, cfg, start=luxemburg(form, f, cfg))


def _ray_subgradient(form: NetworkForm, f: np.ndarray, s: float) -> np.ndarray:
    """A subgradient ``phi`` of ``E`` at some ``lam * f`` with ``<phi, f>`` close to ``s``.

    Only a starting point for the dual descent; any failure returns 0.
    """
    def slope(lam):
        return float(form.subgradient(lam * f) @ f) - s

    try:
        hi = 1.0
        while slope(hi) < 0:
            hi *= 2.0
            if hi > 1e6:
                return np.zeros(form.n)
        lam = brentq(slope, 0.0, hi, xtol=1e-12) if slope(0.0) < 0 else 0.0
        return form.subgradient(lam * f)
    except (ReslabError, ValueError):
        return np.zeros(form.n)


def approximating_form(form: NetworkForm, alpha: float, K, p_pen: float, f,
                       cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``inf_g { E(g) + alpha * sum_{x in K} |f(x) - g(x)|**p_pen }``."""
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be > 0, got {alpha}")
    if not p_pen >= 1:
        raise ValueError(f"penalty exponent must be >= 1, got {p_pen}")
    K = tuple(K)
    if not K:
        raise ValueError("K must be nonempty")
    f = _check_vector(form, f)
    classes = tuple(form.class_of(x) for x in K)
    penalty = Penalty(classes, tuple(float(f[c]) for c in classes), float(alpha), float(p_pen))
    out = minimize_composite(form, np.zeros(form.n), (), cfg, penalty=penalty)
    return max(out.value, 0.0)


@dataclass(frozen=True)
class ResistanceMatrix:
    labels: tuple[str, ...]
    entries: np.ndarray
    kind: str
    t: float | None = None

    def __getitem__(self, pair) -> float:
        x, y = pair
        try:
            return float(self.entries[self.labels.index(x), self.labels.index(y)])
        except ValueError:
            raise UnknownVertex(f"unknown vertex in {pair!r}") from None


def resistance_matrix(form: NetworkForm, kind: str = "elementary", t: float | None = None,
                      cfg: SolveConfig = DEFAULT_CONFIG) -> ResistanceMatrix:
    """All ordered pairs of ``R`` (``kind="elementary"``) or ``R_t`` (``kind="t"``).

    Pairs separated by a flat direction are infinite and never reach the
    solver.
    """
    if kind == "elementary":
        def one(x, y):
            return elementary_resistance(form, x, y, cfg)
    elif kind == "t":
        if t is None:
            raise ValueError("kind='t' needs t")
        _check_t(t)

        def one(x, y):
            return t_resistance(form, x, y, t, cfg)
    else:
        raise ValueError(f"unknown resistance kind {kind!r}")
    labels = form.vertices
    reps = [form.classes[c][0] for c in range(form.n)]
    by_class = np.zeros((form.n, form.n))
    for i, x in enumerate(reps):
        for j, y in enumerate(reps):
            if i != j:
                by_class[i, j] = one(x, y)
    idx = np.array([form.class_of(v) for v in labels], dtype=int)
    return ResistanceMatrix(labels, by_class[np.ix_(idx, idx)], kind,
                            None if t is None else float(t))
