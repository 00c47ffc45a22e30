"""Sampled checks of the structural properties of resistance forms.

Each checker returns a :class:`VerifyReport`.  Violations are normalized by
``1 + |right-hand side|`` unless stated otherwise, and a report passes iff
its worst violation is at most its tolerance.  Checks that quantify over
all functions or all contractions are replaced by seeded random sampling
(Gaussian coordinates at scales 0.1, 1 and 10), so a pass is evidence and
not a proof.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex import FoldAt, Identity, MinWith, random_piecewise_linear
from .errors import DirichletOperand, MixedExponents, PreconditionError, TooLarge
from .forms import NetworkForm, disjoint_labels, series_identify, series_resistor
from .resistance import (
    ORLICZ_MAX_CLASSES, approximating_form, conjugate, elementary_resistance, luxemburg,
    orlicz, t_resistance,
)
from .solvers import DEFAULT_CONFIG, SolveConfig

__all__ = [
    "VerifyReport", "Delta2Estimate", "check_contraction_compatibility", "check_triangle",
    "check_additivity_identify", "check_additivity_resistor", "check_homogeneous_identity",
    "check_fundamental_inequalities", "estimate_delta2_nabla2", "check_p_contraction_map",
    "check_sup_approximation", "sample_functions",
]

SCALES = (0.1, 1.0, 10.0)


def _ext(v):
    """JSON-safe extended real."""
    v = float(v)
    if math.isinf(v):
        return {"inf": True} if v > 0 else {"inf": True, "negative": True}
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _ext(obj)
    return obj


@dataclass
class VerifyReport:
    property: str
    passed: bool
    samples: int
    worst_violation: float
    witness: dict | None
    tolerance: float
    note: str = "sampled check"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "passed": bool(self.passed),
            "samples": int(self.samples),
            "worst_violation": _ext(self.worst_violation),
            "tolerance": float(self.tolerance),
            "witness": _jsonable(self.witness),
            "note": self.note,
        }


class _Worst:
    """Running maximum of violations with the witness that attained it."""

    def __init__(self):
        self.value = -math.inf
        self.witness = None
        self.count = 0

    def add(self, violation, witness):
        self.count += 1
        if violation > self.value or self.witness is None:
            self.value = float(violation)
            self.witness = witness

    def report(self, name, tol, note="sampled check") -> VerifyReport:
        worst = max(self.value, 0.0) if self.count else 0.0
        return VerifyReport(name, worst <= tol, self.count, worst, self.witness, tol, note)


def _violation(lhs, rhs):
    """``(lhs - rhs) / (1 + |rhs|)`` with infinities handled."""
    if math.isinf(rhs) and rhs > 0:
        return 0.0
    if math.isinf(lhs):
        return math.inf
    return (lhs - rhs) / (1.0 + abs(rhs))


def _gap(lhs, rhs):
    """Symmetric ``|lhs - rhs| / (1 + |rhs|)``; equal infinities give 0."""
    if math.isinf(lhs) or math.isinf(rhs):
        return 0.0 if lhs == rhs else math.inf
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def _project_domain(form: NetworkForm, F: np.ndarray) -> np.ndarray:
    """Make sampled functions satisfy the Dirichlet conditions."""
    if not form.dirichlet:
        return F
    F = np.array(F, dtype=float)
    cls = form._cls(form.dirichlet)
    if form.boundary_vertex is None:
        F[..., cls] = 0.0
    else:
        F[..., cls] = F[..., [form.class_of(form.boundary_vertex)]]
    return F


def sample_functions(form: NetworkForm, n_samples: int, seed: int = 0,
                     scales=SCALES) -> np.ndarray:
    """Gaussian functions cycling through ``scales`` (default 0.1, 1, 10), inside the domain."""
    rng = np.random.default_rng(seed)
    scales = np.array([scales[i % len(scales)] for i in range(n_samples)])
    return _project_domain(form, rng.standard_normal((n_samples, form.n)) * scales[:, None])


def _as_samples(form, f_samples, seed):
    if isinstance(f_samples, (int, np.integer)):
        return sample_functions(form, int(f_samples), seed)
    F = np.atleast_2d(np.asarray(f_samples, dtype=float))
    if F.shape[-1] != form.n:
        from .errors import DimensionMismatch
        raise DimensionMismatch(f"samples must have {form.n} coordinates")
    return F


def _draw_contraction(family, rng):
    if family == "identity":
        return Identity()
    if family == "min":
        return MinWith(float(3.0 * (1.0 - rng.random())))
    if family == "fold":
        return FoldAt(float(rng.uniform(-3.0, 3.0)))
    if family == "piecewise":
        return random_piecewise_linear(rng)
    raise ValueError(f"unknown contraction family {family!r}")


def check_contraction_compatibility(form: NetworkForm,
                                    families=("min", "fold", "piecewise"),
                                    n_samples: int = 1000, seed: int = 0,
                                    tol: float = 1e-9) -> VerifyReport:
    """``E(f + Cg) + E(f - Cg) <= E(f + g) + E(f - g)`` on sampled ``f, g, C``."""
    rng = np.random.default_rng(seed)
    scales = np.array([SCALES[i % 3] for i in range(n_samples)])
    F = _project_domain(form, rng.standard_normal((n_samples, form.n)) * scales[:, None])
    G = _project_domain(form, rng.standard_normal((n_samples, form.n)) * scales[:, None])
    Cs = [_draw_contraction(families[i % len(families)], rng) for i in range(n_samples)]
    CG = np.stack([C(g) for C, g in zip(Cs, G)])
    lhs = form.evaluate(F + CG) + form.evaluate(F - CG)
    rhs = form.evaluate(F + G) + form.evaluate(F - G)
    worst = _Worst()
    for i in range(n_samples):
        worst.add(_violation(lhs[i], rhs[i]), {
            "f": F[i], "g": G[i], "contraction": Cs[i].to_dict(),
            "lhs": lhs[i], "rhs": rhs[i]})
    return worst.report("contraction_compatibility", tol)


def _t_matrix(form, t, cfg):
    cache = {}

    def R(x, y):
        key = (form.class_of(x), form.class_of(y))
        if key not in cache:
            cache[key] = t_resistance(form, x, y, t, cfg)
        return cache[key]
    return R


def check_triangle(form: NetworkForm, t: float, vertex_triples=None,
                   cfg: SolveConfig = DEFAULT_CONFIG, tol: float = 1e-5) -> VerifyReport:
    """``R_t(x, z) <= R_t(x, y) + R_t(y, z)`` over the given (default: all) triples."""
    R = _t_matrix(form, t, cfg)
    if vertex_triples is None:
        reps = [c[0] for c in form.classes]
        vertex_triples = [(x, y, z) for x in reps for y in reps for z in reps]
    worst = _Worst()
    for x, y, z in vertex_triples:
        lhs = R(x, z)
        rhs = R(x, y) + R(y, z)
        worst.add(_violation(lhs, rhs), {"triple": [x, y, z], "t": t, "lhs": lhs, "rhs": rhs})
    return worst.report("triangle", tol, note="exhaustive over the listed triples")


def _check_serial_operand(form: NetworkForm):
    if form.dirichlet or form.boundary_vertex is not None:
        raise DirichletOperand("additivity needs operands without Dirichlet vertices "
                               "or boundary point")
    ones = np.ones(form.n)
    if form.evaluate(ones) != 0 or form.evaluate(10.0 * ones) != 0:
        raise PreconditionError("operand energy must vanish on constants")


def _additivity(name, glued, mapping, form1, xi1, form2, xi2, x1, x2, t, cfg, tol,
                offset=0.0):
    lhs = t_resistance(glued, x1, mapping[x2], t, cfg)
    r1 = t_resistance(form1, x1, xi1, t, cfg)
    r2 = t_resistance(form2, xi2, x2, t, cfg)
    rhs = r1 + r2 + offset
    worst = _Worst()
    worst.add(_gap(lhs, rhs), {"x1": x1, "x2": x2, "xi1": xi1, "xi2": xi2, "t": t,
                              "glued": lhs, "part1": r1, "part2": r2, "offset": offset})
    return worst.report(name, tol, note="single evaluation")


def check_additivity_identify(form1: NetworkForm, xi1: str, form2: NetworkForm, xi2: str,
                              x1: str, x2: str, t: float,
                              cfg: SolveConfig = DEFAULT_CONFIG,
                              tol: float = 1e-4) -> VerifyReport:
    """``R_t(x1, x2)`` on the glued form equals ``R_t(x1, xi1) + R_t(xi2, x2)``."""
    _check_serial_operand(form1)
    _check_serial_operand(form2)
    form1.class_of(x1)
    form2.class_of(x2)
    glued = series_identify(form1, xi1, form2, xi2)
    _, mapping = disjoint_labels(form1, form2)
    return _additivity("additivity_identify", glued, mapping, form1, xi1, form2, xi2,
                       x1, x2, t, cfg, tol)


def check_additivity_resistor(form1: NetworkForm, xi1: str, form2: NetworkForm, xi2: str,
                              x1: str, x2: str, t: float, eps: float,
                              cfg: SolveConfig = DEFAULT_CONFIG,
                              tol: float = 1e-4) -> VerifyReport:
    """As :func:`check_additivity_identify` through a connector, plus ``eps * t**2``."""
    _check_serial_operand(form1)
    _check_serial_operand(form2)
    form1.class_of(x1)
    form2.class_of(x2)
    glued = series_resistor(form1, xi1, form2, xi2, eps)
    _, mapping = disjoint_labels(form1, form2)
    return _additivity("additivity_resistor", glued, mapping, form1, xi1, form2, xi2,
                       x1, x2, t, cfg, tol, offset=eps * t * t)


def homogeneity_exponent(form: NetworkForm, p: float | None = None) -> float:
    exps = form.exponents()
    if None in exps or len(exps) > 1:
        raise MixedExponents(f"form is not positively homogeneous (exponents {exps})")
    if not exps:
        if p is None:
            raise MixedExponents("form has no energy terms; pass p explicitly")
        return float(p)
    (found,) = exps
    if p is not None and found != p:
        raise MixedExponents(f"form is {found}-homogeneous, not {p}-homogeneous")
    return float(found)


def check_homogeneous_identity(form: NetworkForm, p: float | None = None,
                               t_list=(0.25, 1.0, 4.0), pairs=None,
                               cfg: SolveConfig = DEFAULT_CONFIG,
                               tol: float = 1e-3) -> VerifyReport:
    """``R_t = (p - 1) (t / p)**q R**q`` for p > 1; the 0 / inf dichotomy at p = 1.

    For ``p = 1`` pairs with ``t R`` within ``tol`` of 1 are skipped and a
    violation is the reported ``R_t`` where 0 is expected, ``inf`` where a
    finite value is reported although infinity is expected.
    """
    p = homogeneity_exponent(form, p)
    if pairs is None:
        reps = [c[0] for c in form.classes]
        pairs = [(x, y) for i, x in enumerate(reps) for y in reps[i + 1:]]
    worst = _Worst()
    for x, y in pairs:
        R = elementary_resistance(form, x, y, cfg)
        for t in t_list:
            Rt = t_resistance(form, x, y, t, cfg)
            wit = {"pair": [x, y], "t": t, "R": R, "R_t": Rt, "p": p}
            if p > 1:
                q = p / (p - 1.0)
                pred = (p - 1.0) * (t / p) ** q * R ** q
                wit["predicted"] = pred
                worst.add(_gap(Rt, pred) if math.isinf(Rt) or math.isinf(pred)
                          else abs(Rt - pred) / (1.0 + Rt), wit)
            elif t * R <= 1.0 - tol:
                worst.add(abs(Rt), wit)
            elif t * R >= 1.0 + tol:
                worst.add(0.0 if math.isinf(Rt) else math.inf, wit)
    return worst.report("homogeneous_identity", tol, note="exhaustive over pairs and t")


def check_fundamental_inequalities(form: NetworkForm, f_samples=50, seed: int = 0,
                                   cfg: SolveConfig = DEFAULT_CONFIG,
                                   tol: float = 1e-4) -> VerifyReport:
    """``|f|_L <= |f|_O <= 2 |f|_L`` and Fenchel-Young on sampled pairs."""
    if form.n > ORLICZ_MAX_CLASSES:
        raise TooLarge(f"needs at most {ORLICZ_MAX_CLASSES} coordinate classes")
    F = _as_samples(form, f_samples, seed)
    rng = np.random.default_rng(seed + 1)
    flats = form.flat_components()
    worst = _Worst()
    for f in F:
        L = luxemburg(form, f, cfg)
        O = orlicz(form, f, cfg)
        worst.add(_violation(L, O), {"f": f, "inequality": "L <= O", "L": L, "O": O})
        worst.add(_violation(O, 2 * L), {"f": f, "inequality": "O <= 2L", "L": L, "O": O})
        phi = rng.standard_normal(form.n)
        for comp in flats:
            phi[comp] -= phi[comp].mean()
        Ef = form.evaluate(f)
        Es = conjugate(form, phi, cfg)
        worst.add(_violation(float(phi @ f), Ef + Es),
                  {"f": f, "phi": phi, "inequality": "Fenchel-Young",
                   "pairing": float(phi @ f), "E": Ef, "E*": Es})
    return worst.report("fundamental_inequalities", tol)


@dataclass
class Delta2Estimate:
    """Sampled doubling ratios ``E(2f) / E(f)``; estimates, not proofs."""

    c_hat: float
    k_hat: float
    delta2_plausible: bool
    nabla2_plausible: bool
    samples: int
    witness: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return _jsonable({
            "property": "delta2_nabla2", "c_hat": self.c_hat, "k_hat": self.k_hat,
            "delta2_plausible": self.delta2_plausible,
            "nabla2_plausible": self.nabla2_plausible, "samples": self.samples,
            "witness": self.witness, "note": "sampled estimate, not a proof"})


def estimate_delta2_nabla2(form: NetworkForm, f_samples=200, seed: int = 0,
                           functional=None) -> Delta2Estimate:
    """Largest and smallest sampled ``E(2f) / E(f)`` over ``0 < E(f) < inf``.

    ``functional`` replaces ``form.evaluate`` (e.g. by a conjugate), taking
    one vector at a time.
    """
    F = _as_samples(form, f_samples, seed)
    if functional is None:
        E1, E2 = form.evaluate(F), form.evaluate(2.0 * F)
    else:
        E1 = np.array([functional(f) for f in F])
        E2 = np.array([functional(2.0 * f) for f in F])
    c_hat, k_hat, witness, used = -math.inf, math.inf, None, 0
    for f, a, b in zip(F, E1, E2):
        if not (0 < a < math.inf):
            continue
        used += 1
        r = b / a
        if r > c_hat:
            c_hat, witness = r, {"f": f, "E(f)": a, "E(2f)": b}
        k_hat = min(k_hat, r)
    if used == 0:
        c_hat = k_hat = math.nan
    return Delta2Estimate(c_hat, k_hat, bool(c_hat < math.inf), bool(k_hat > 2.0),
                          used, witness)


def check_p_contraction_map(form: NetworkForm, p: float | None = None,
                            n_samples: int = 300, seed: int = 0,
                            tol: float = 1e-9) -> VerifyReport:
    """Two-coordinate p-contraction inequality for the map ``T`` built from ``C``.

    ``T(w, z) = ((w + z)/2 + C((w - z)/2), (w + z)/2 - C((w - z)/2))`` is
    applied pointwise to ``(f + g, f - g)`` and the check is
    ``|E^{1/p}(T(f+g, f-g))|_p <= |E^{1/p}(f+g, f-g)|_p``.
    """
    p = homogeneity_exponent(form, p)
    rng = np.random.default_rng(seed)
    families = ("identity", "min", "fold", "piecewise")
    worst = _Worst()
    for i in range(n_samples):
        scale = SCALES[i % 3]
        f, g = _project_domain(form, rng.standard_normal((2, form.n)) * scale)
        C = _draw_contraction(families[i % len(families)], rng)
        w, z = f + g, f - g
        mid, half = (w + z) / 2.0, C((w - z) / 2.0)
        T1, T2 = mid + half, mid - half
        lhs = (form.evaluate(T1) + form.evaluate(T2)) ** (1.0 / p)
        rhs = (form.evaluate(w) + form.evaluate(z)) ** (1.0 / p)
        worst.add(_violation(lhs, rhs), {"f": f, "g": g, "contraction": C.to_dict(),
                                         "lhs": lhs, "rhs": rhs})
    return worst.report("p_contraction_map", tol)


def check_sup_approximation(form: NetworkForm, f_samples=20, seed: int = 0,
                            alpha_schedule=(1.0, 10.0, 100.0, 1000.0),
                            cfg: SolveConfig = DEFAULT_CONFIG, tol: float = 1e-2,
                            p_pen: float = 2.0, infinite_threshold: float = 1.0,
                            K=None) -> VerifyReport:
    """Approximants ``E^(alpha, K)`` increase in alpha, stay below ``E`` and reach it.

    With ``K`` all vertices (the default) the approximant at the largest
    alpha must be within ``tol`` of ``E(f)`` (absolute).  The quadratic
    penalty closes the gap only like ``|grad E|**2 / (4 alpha)``; with
    ``p_pen=1`` the approximant equals ``E(f)`` as soon as alpha exceeds the
    largest subgradient entry.  Where ``E(f)`` is
    infinite it must exceed ``infinite_threshold`` or, for ``f`` barely
    outside the domain, at least double over the last step of the schedule
    (the approximants then grow like alpha).
    """
    F = _as_samples(form, f_samples, seed)
    K = tuple(form.vertices) if K is None else tuple(K)
    worst = _Worst()
    mono_slack = 1e-7
    for f in F:
        E = form.evaluate(f)
        vals = [approximating_form(form, a, K, p_pen, f, cfg) for a in alpha_schedule]
        wit = {"f": f, "E": E, "alphas": list(alpha_schedule), "approximants": vals}
        for a, b in zip(vals, vals[1:]):
            worst.add(max(a - b - mono_slack * (1 + abs(b)), 0.0), dict(wit, check="monotone"))
        for v in vals:
            worst.add(max(_violation(v, E) - mono_slack, 0.0), dict(wit, check="below E"))
        if math.isfinite(E):
            worst.add(abs(E - vals[-1]), dict(wit, check="limit"))
        else:
            growing = vals[-1] >= 2.0 * vals[-2] > 0 if len(vals) > 1 else False
            worst.add(0.0 if vals[-1] > infinite_threshold or growing else math.inf,
                      dict(wit, check="limit (infinite energy)"))
    return worst.report("sup_approximation", tol)
