"""The two optimization primitives behind every resistance quantity.

``minimize_composite``
    minimize ``E(f) - <linear, f>`` (plus optional separable penalties)
    subject to coordinate pins;
``sup_linear_over_sublevel``
    ``sup { <linear, f> : E(f) <= 1 }`` by root finding on the level
    function ``m(s) = min { E(f) : <linear, f> = s }``.

Both are conic programs.  Energies are translated into cvxpy expressions
and solved with Clarabel; a compiled, parametrized problem is cached per
form so that repeated solves only re-bind parameters.

Flat directions (indicators of coordinate sets along which ``E`` is
constant, see :meth:`NetworkForm.flat_components`) are handled before any
solve: a linear functional that does not vanish on one of them makes the
problem unbounded, otherwise one coordinate per flat set is pinned to 0.
"""
from __future__ import annotations

import enum
import math
import warnings
import weakref
from dataclasses import dataclass

import cvxpy as cp
import numpy as np
from scipy.optimize import brentq

from .convex import Capped, CoshMinusOne, ScaledPower
from .errors import DimensionMismatch, SolverWarning, ZeroLinear
from .forms import NetworkForm

__all__ = [
    "SolveConfig", "SolveOutcome", "Status", "Penalty",
    "minimize_composite", "min_energy_on_level", "sup_linear_over_sublevel",
    "level_crossing",
]


@dataclass(frozen=True)
class SolveConfig:
    tol_rel: float = 1e-8
    tol_abs: float = 1e-10
    max_iters: int = 100_000
    divergence_norm_bound: float = 1e9
    divergence_value_bound: float = 1e12
    bisection_bracket_growth: float = 2.0

    def __post_init__(self):
        for name in ("tol_rel", "tol_abs", "max_iters", "divergence_norm_bound",
                     "divergence_value_bound"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.bisection_bracket_growth > 1:
            raise ValueError("bisection_bracket_growth must exceed 1")


DEFAULT_CONFIG = SolveConfig()


class Status(enum.Enum):
    CONVERGED = "Converged"
    UNBOUNDED = "Unbounded"
    MAX_ITERS = "MaxIters"


@dataclass(frozen=True)
class SolveOutcome:
    value: float
    argopt: np.ndarray | None
    status: Status
    iterations: int = 0


@dataclass(frozen=True)
class Penalty:
    """Separable term ``alpha * sum_i |f(classes[i]) - targets[i]|**p``."""

    classes: tuple[int, ...]
    targets: tuple[float, ...]
    alpha: float
    p: float


# --- translation to cvxpy ---------------------------------------------------

def _scalar_expr(w, d, constraints):
    if isinstance(w, ScaledPower):
        if w.c == 0:
            return 0
        if w.p == 1:
            return w.c * cp.abs(d)
        if w.p == 2:
            return (w.c / 2) * cp.square(d)
        return (w.c / w.p) * cp.power(cp.abs(d), w.p)
    if isinstance(w, CoshMinusOne):
        if w.c == 0:
            return 0
        return (w.c / 2) * (cp.exp(d) + cp.exp(-d)) - w.c
    if isinstance(w, Capped):
        constraints.append(cp.abs(d) <= w.cap)
        return _scalar_expr(w.inner, d, constraints)
    raise TypeError(f"unsupported scalar function {w!r}")


def _energy_expr(form: NetworkForm, f, constraints):
    if form.boundary_vertex is not None:
        g = f - f[form.class_of(form.boundary_vertex)]
    else:
        g = f
    terms = []
    for e in form.edges:
        terms.append(_scalar_expr(e.w, g[form.class_of(e.u)] - g[form.class_of(e.v)],
                                  constraints))
    for s in form.sums:
        terms.append(_scalar_expr(s.w, g[form.class_of(s.u)] + g[form.class_of(s.v)],
                                  constraints))
    for h in form.hyperedges:
        if h.mu > 0:
            idx = form._cls(h.vertices)
            terms.append(h.mu * cp.square(cp.pos(cp.max(g[idx]) - cp.min(g[idx]))))
    terms = [t for t in terms if not (isinstance(t, (int, float)) and t == 0)]
    return cp.sum(cp.hstack(terms)) if terms else cp.Constant(0.0)


class _Layout:
    """Reduction ``f = M z + pinned`` to free coordinates ``z``.

    Dirichlet classes are substituted exactly: fixed to 0, or tied to the
    boundary coordinate when a boundary vertex exists.
    """

    def __init__(self, form: NetworkForm, pinned: tuple[int, ...]):
        n = form.n
        rep = list(range(n))
        fixed = set(pinned)
        if form.dirichlet:
            if form.boundary_vertex is None:
                fixed |= {form.class_of(v) for v in form.dirichlet}
            else:
                b = form.class_of(form.boundary_vertex)
                for v in form.dirichlet:
                    rep[form.class_of(v)] = b
        self.fixed = tuple(sorted(fixed))
        free = [c for c in range(n) if rep[c] == c and c not in fixed]
        col = {c: j for j, c in enumerate(free)}
        M = np.zeros((n, len(free)))
        tied = np.zeros((n, n))
        for c in range(n):
            r = rep[c]
            if r in col:
                M[c, col[r]] = 1.0
            tied[c, r] = 1.0
        self.M = M
        self.tied = tied  # maps class-wise pin values onto every class sharing them
        self.m = len(free)
        self.n = n

    def pin_vector(self, pins: dict[int, float]) -> np.ndarray:
        v = np.zeros(self.n)
        for c, val in pins.items():
            v[c] = val
        return self.tied @ v


class _Compiled:
    def __init__(self, form, layout: _Layout, kind: str, penalty_shape=None):
        self.layout = layout
        m = max(layout.m, 1)
        self.z = cp.Variable(m)
        self.pins = cp.Parameter(layout.n)
        f = (layout.M @ self.z if layout.m else 0) + self.pins
        constraints = []
        energy = _energy_expr(form, f, constraints)
        self.lin = cp.Parameter(m)
        if kind == "composite":
            obj = energy - self.lin @ self.z
            if penalty_shape is not None:
                # alpha is structural: a parameter would multiply the pin parameter
                classes, alpha, p = penalty_shape
                self.targets = cp.Parameter(len(classes))
                diff = f[np.array(classes)] - self.targets
                pen = cp.sum(cp.abs(diff)) if p == 1 else (
                    cp.sum_squares(diff) if p == 2 else cp.sum(cp.power(cp.abs(diff), p)))
                obj = obj + alpha * pen
            self.problem = cp.Problem(cp.Minimize(obj), constraints)
        else:
            self.level = cp.Parameter()
            constraints.append(self.lin @ self.z == self.level)
            self.problem = cp.Problem(cp.Minimize(energy), constraints)

    def solve(self, cfg: SolveConfig):
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="Solution may be inaccurate")
            return self._solve(cfg)

    def _solve(self, cfg: SolveConfig):
        try:
            # no warm start: results must not depend on the solve history
            self.problem.solve(solver=cp.CLARABEL, warm_start=False,
                               max_iter=int(min(cfg.max_iters, 2**31 - 1)),
                               tol_gap_rel=cfg.tol_rel, tol_gap_abs=max(cfg.tol_abs, 1e-12))
        except cp.error.SolverError:
            # Clarabel occasionally stalls on badly scaled exponential cones
            self.problem.solve(solver=cp.SCS, warm_start=False, eps=1e-10, max_iters=int(cfg.max_iters))
        stats = self.problem.solver_stats
        iters = int(stats.num_iters) if stats is not None and stats.num_iters is not None else 0
        return self.problem.status, iters

    def point(self) -> np.ndarray:
        z = self.z.value if self.layout.m else np.zeros(0)
        return (self.layout.M @ z if self.layout.m else 0.0) + self.pins.value


_CACHE: "weakref.WeakKeyDictionary[NetworkForm, dict]" = weakref.WeakKeyDictionary()


def _compiled(form: NetworkForm, pinned: tuple[int, ...], kind: str, penalty_shape=None):
    per_form = _CACHE.setdefault(form, {})
    key = (pinned, kind, penalty_shape)
    if key not in per_form:
        per_form[key] = _Compiled(form, _Layout(form, pinned), kind, penalty_shape)
    return per_form[key]


def _as_class(form: NetworkForm, coord) -> int:
    if isinstance(coord, str):
        return form.class_of(coord)
    c = int(coord)
    if not 0 <= c < form.n:
        raise DimensionMismatch(f"coordinate {c} out of range for {form.n} classes")
    return c


def _gauge(form: NetworkForm, linear: np.ndarray, pins: dict[int, float], anchored=()):
    """Extend ``pins`` by one zero pin per flat set; ``None`` if unbounded."""
    pins = dict(pins)
    scale = 1.0 + float(np.abs(linear).sum())
    for comp in form.flat_components(tuple(pins) + tuple(anchored)):
        if abs(float(linear[comp].sum())) > 1e-12 * scale:
            return None
        pins.setdefault(int(comp[0]), 0.0)
    return pins


_UNBOUNDED = ("unbounded", "unbounded_inaccurate")
_INFEASIBLE = ("infeasible", "infeasible_inaccurate")


def _status(raw: str) -> Status:
    if raw in _UNBOUNDED:
        return Status.UNBOUNDED
    if raw in ("optimal", "optimal_inaccurate") or raw in _INFEASIBLE:
        return Status.CONVERGED
    return Status.MAX_ITERS


def minimize_composite(form: NetworkForm, linear, pins=(), cfg: SolveConfig = DEFAULT_CONFIG,
                       penalty: Penalty | None = None) -> SolveOutcome:
    """Minimize ``E(f) - <linear, f>`` (+ ``penalty``) with pinned coordinates.

    ``pins`` is an iterable of ``(coordinate, value)`` where a coordinate is a
    class index or a vertex label.  The returned value is ``-inf`` with status
    ``Unbounded`` when the infimum is ``-inf``.
    """
    linear = np.asarray(linear, dtype=float)
    if linear.shape != (form.n,):
        raise DimensionMismatch(f"linear functional must have shape ({form.n},)")
    pin_map = {_as_class(form, c): float(v) for c, v in pins}
    anchored = penalty.classes if penalty is not None else ()
    full = _gauge(form, linear, pin_map, anchored)
    if full is None:
        return SolveOutcome(-math.inf, None, Status.UNBOUNDED, 0)
    pinned = tuple(sorted(full))
    shape = None if penalty is None else (
        tuple(penalty.classes), float(penalty.alpha), float(penalty.p))
    prob = _compiled(form, pinned, "composite", shape)
    layout = prob.layout
    pin_values = layout.pin_vector(full)
    prob.pins.value = pin_values
    prob.lin.value = layout.M.T @ linear if layout.m else np.zeros(1)
    if penalty is not None:
        prob.targets.value = np.asarray(penalty.targets, dtype=float)
    raw, iters = prob.solve(cfg)
    status = _status(raw)
    if status is Status.UNBOUNDED:
        return SolveOutcome(-math.inf, None, status, iters)
    if raw in _INFEASIBLE:
        return SolveOutcome(math.inf, None, status, iters)
    if prob.problem.value is None:
        warnings.warn(f"solver returned status {raw!r}", SolverWarning, stacklevel=2)
        return SolveOutcome(math.nan, None, Status.MAX_ITERS, iters)
    f = prob.point()
    # score the returned point exactly; fall back to the solver's objective
    # when rounding pushed it marginally outside a capped domain
    value = float(form.evaluate(f)) - float(linear @ f)
    if penalty is not None:
        value += penalty.alpha * float(np.sum(
            np.abs(f[np.array(penalty.classes)] - np.asarray(penalty.targets)) ** penalty.p))
    if not math.isfinite(value):
        value = float(prob.problem.value) - float(linear @ pin_values)
    if (np.linalg.norm(f) > cfg.divergence_norm_bound
            and value < -cfg.divergence_value_bound):
        return SolveOutcome(-math.inf, None, Status.UNBOUNDED, iters)
    if status is Status.MAX_ITERS:
        warnings.warn("iteration limit reached", SolverWarning, stacklevel=2)
    return SolveOutcome(value, f, status, iters)


def min_energy_on_level(form: NetworkForm, linear, s: float,
                        cfg: SolveConfig = DEFAULT_CONFIG) -> SolveOutcome:
    """``min { E(f) : <linear, f> = s }`` with gauge pins on flat sets.

    Infinite (status ``Converged``, no argopt) when the level set misses the
    effective domain of ``E``.
    """
    linear = np.asarray(linear, dtype=float)
    if linear.shape != (form.n,):
        raise DimensionMismatch(f"linear functional must have shape ({form.n},)")
    pins = _gauge(form, linear, {})
    if pins is None:
        # the level set contains a whole line of flat directions
        comp = next(c for c in form.flat_components()
                    if abs(float(linear[c].sum())) > 0)
        f = np.zeros(form.n)
        f[comp] = s / float(linear[comp].sum())
        return SolveOutcome(0.0, f, Status.CONVERGED, 0)
    prob = _compiled(form, tuple(sorted(pins)), "level")
    layout = prob.layout
    prob.pins.value = np.zeros(form.n)
    reduced = layout.M.T @ linear if layout.m else np.zeros(1)
    if not np.any(reduced):
        return SolveOutcome(0.0 if s == 0 else math.inf, None, Status.CONVERGED, 0)
    prob.lin.value = reduced
    prob.level.value = float(s)
    raw, iters = prob.solve(cfg)
    if raw in _INFEASIBLE:
        return SolveOutcome(math.inf, None, Status.CONVERGED, iters)
    status = _status(raw)
    if prob.problem.value is None:
        warnings.warn(f"solver returned status {raw!r}", SolverWarning, stacklevel=2)
        return SolveOutcome(math.nan, None, Status.MAX_ITERS, iters)
    if status is Status.MAX_ITERS:
        warnings.warn("iteration limit reached", SolverWarning, stacklevel=2)
    f = prob.point()
    # an exact score of the returned point; a point pushed outside a capped
    # domain by solver rounding counts as infeasible
    return SolveOutcome(float(form.evaluate(f)), f, status, iters)


def sup_linear_over_sublevel(form: NetworkForm, linear,
                             cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``sup { <linear, f> : E(f) <= 1 }``, possibly ``inf``.

    The level function ``m(s)`` is convex, nondecreasing on ``s >= 0`` and
    vanishes at 0, so the answer is the crossing ``m(s) = 1``.  It is
    bracketed by geometric growth and located with Brent's method.
    """
    linear = np.asarray(linear, dtype=float)
    if linear.shape != (form.n,):
        raise DimensionMismatch(f"linear functional must have shape ({form.n},)")
    if not np.any(linear):
        raise ZeroLinear("linear functional is zero")
    if _gauge(form, linear, {}) is None:
        return math.inf

    return level_crossing(lambda s: min_energy_on_level(form, linear, s, cfg).value, cfg)


def level_crossing(m, cfg: SolveConfig = DEFAULT_CONFIG, start: float = 1.0) -> float:
    """``sup { s >= 0 : m(s) <= 1 }`` for convex nondecreasing ``m`` with ``m(0) = 0``.

    The bracket search starts at ``start``.  Returns ``inf`` when ``m`` stays
    below 1 up to ``divergence_norm_bound`` and 0 when it exceeds 1 down to
    ``tol_abs``.
    """
    seen: dict[float, float] = {}
    raw = m

    def m(s):
        if s not in seen:
            seen[s] = raw(s)
        return seen[s]

    grow = cfg.bisection_bracket_growth
    s = float(start) if start > 0 and math.isfinite(start) else 1.0
    if m(s) <= 1.0:
        lo = s
        while True:
            s *= grow
            if s > cfg.divergence_norm_bound:
                return math.inf
            if m(s) > 1.0:
                hi = s
                break
            lo = s
    else:
        hi = s
        while True:
            s /= grow
            if s < cfg.tol_abs:
                return 0.0
            if m(s) <= 1.0:
                lo = s
                break
            hi = s

    def gap(s):
        # brentq needs finite values; m may jump to inf past a capped domain
        return min(m(s), 1e6) - 1.0

    if gap(lo) == 0.0:
        return lo
    return float(brentq(gap, lo, hi, xtol=cfg.tol_rel, rtol=max(cfg.tol_rel, 4e-16)))
