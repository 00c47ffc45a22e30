"""Solver-free reference computations.

The grid oracle evaluates the energy on a regular lattice of coordinate
vectors (one coordinate pinned to 0, which loses nothing for forms with
constants in their kernel) and refines once around the best lattice point.
It handles up to three coordinate classes.  Resistances are located by
bisection on the lattice minimum of the energy over a level set, which
avoids the coarse error of maximizing over lattice points of a sublevel
set directly.
"""
import math

import numpy as np
from scipy.optimize import minimize_scalar

G, STEP, REFINE = 8.0, 1.0 / 64.0, 32


def _lattice(center, half_width, step, dims):
    axes = [np.arange(c - half_width, c + half_width + step / 2, step) for c in center]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1) if dims else np.zeros((1, 0))


def _embed(form, free):
    """Coordinate vectors with the last class pinned to 0."""
    return np.concatenate([free, np.zeros((free.shape[0], 1))], axis=1)


def _grid_max(form, score):
    """max over the lattice of ``score(F)`` (``-inf`` for excluded points), refined once."""
    assert form.n <= 3, "grid oracle handles at most three classes"
    return _grid_max_dims(lambda Z: score(_embed(form, Z)), form.n - 1)


def grid_level_min(form, linear, s):
    """``min { E(f) : <linear, f> = s }`` by a lattice over the level set, refined once."""
    assert form.n <= 3, "grid oracle handles at most three classes"
    lin = np.asarray(linear, dtype=float)[:-1]
    k = int(np.argmax(np.abs(lin)))
    others = [j for j in range(form.n - 1) if j != k]

    def score(Z):
        free = np.zeros((Z.shape[0], form.n - 1))
        free[:, others] = Z
        free[:, k] = (s - Z @ lin[others]) / lin[k]
        return -form.evaluate(_embed(form, free))
    return -_grid_max_dims(score, len(others))


def _grid_max_dims(score, dims):
    pts = _lattice([0.0] * dims, G, STEP, dims)
    vals = score(pts)
    best = int(np.argmax(vals))
    fine = _lattice(pts[best], 2 * STEP, STEP / REFINE, dims)
    return max(float(vals[best]), float(np.max(score(fine))))


def grid_resistance(form, x, y, iters=60):
    """``sup { s : m(s) <= 1 }`` with ``m`` from :func:`grid_level_min`, by bisection."""
    lin = form.delta(x) - form.delta(y)
    lo, hi = 0.0, 1.0
    while grid_level_min(form, lin, hi) <= 1.0:
        lo, hi = hi, 2.0 * hi
        if hi > G:
            return math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if grid_level_min(form, lin, mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def grid_t_resistance(form, x, y, t):
    lin = t * (form.delta(x) - form.delta(y))
    return _grid_max(form, lambda F: F @ lin - form.evaluate(F))


def grid_composite_min(form, linear):
    return -_grid_max(form, lambda F: F @ linear - form.evaluate(F))


def grid_luxemburg(form, f, lam_max=G):
    """Smallest ``lam`` on a 1/64 grid of ``(0, lam_max]`` with ``E(f/lam) <= 1``, refined."""
    f = np.asarray(f, dtype=float)
    lams = np.arange(STEP, lam_max + STEP / 2, STEP)
    ok = form.evaluate(f[None, :] / lams[:, None]) <= 1.0
    if not ok.any():
        return math.inf
    i = int(np.argmax(ok))
    lo = lams[i - 1] if i > 0 else 0.0
    fine = np.linspace(max(lo, 1e-12), lams[i], 8 * REFINE + 1)
    ok = form.evaluate(f[None, :] / fine[:, None]) <= 1.0
    return float(fine[int(np.argmax(ok))])


def amemiya_orlicz(form, f):
    """``inf_{lam > 0} (1 + E(lam f)) / lam``, a formula for the Orlicz functional.

    A log-spaced scan locates the minimum among finite values, then a bounded
    scalar search refines between the neighbouring scan points.
    """
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return 0.0

    def h(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            e = float(form.evaluate(lam * f))
        return (1.0 + e) / lam if math.isfinite(e) else math.inf

    lams = np.logspace(-6, 4, 401)
    vals = np.array([h(l) for l in lams])
    i = int(np.argmin(vals))
    if not math.isfinite(vals[i]):
        return math.inf
    lo, hi = lams[max(i - 1, 0)], lams[min(i + 1, len(lams) - 1)]
    res = minimize_scalar(h, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * hi})
    return float(min(res.fun, vals[i]))

