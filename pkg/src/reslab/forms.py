"""Convex energies on finite vertex sets.

A :class:`NetworkForm` bundles a vertex set with

* edge terms ``w(f(u) - f(v))`` for scalar convex ``w``,
* hyperedge terms ``mu * (max_K f - min_K f)**2``,
* optional Dirichlet vertices (the energy is infinite unless ``f`` vanishes
  there),
* vertex identifications (identified vertices share one coordinate),
* an optional boundary vertex, at which the energy is evaluated after the
  shift ``f|_X - f(boundary)``.

Functions on the vertices are plain 1-D numpy arrays with one entry per
*coordinate class* (equivalence class of identified vertices), in the order
given by :attr:`NetworkForm.classes`.  Batches of functions are arrays whose
last axis indexes coordinate classes.

Each unordered edge is stored once.  A double sum over ordered pairs with
symmetric weights ``w_xy = w_yx`` therefore corresponds to ``2 * w`` here;
for the weighted p-energy ``sum_{x,y} b_xy |f(x) - f(y)|^p / p`` use
``ScaledPower(c=2 * b, p)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .convex import ScalarConvex, ScaledPower
from .errors import (
    BoundaryAlreadyPresent, ConstructionError, DimensionMismatch, DirichletOperand,
    DomainBoundary, InfiniteEnergy, NonPositiveEpsilon, SelfLoop, SingletonHyperedge,
    UnknownVertex,
)

__all__ = [
    "Edge", "Hyperedge", "SumTerm", "NetworkForm",
    "build_graph_form", "build_hypergraph_form", "restrict_dirichlet",
    "adjoin_boundary_point", "series_identify", "series_resistor", "disjoint_labels",
    "evaluate", "subgradient", "connectivity_report",
]

BOUNDARY_LABEL = "Δ"


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    w: ScalarConvex


@dataclass(frozen=True)
class Hyperedge:
    vertices: tuple[str, ...]
    mu: float


@dataclass(frozen=True)
class SumTerm:
    """``w(f(u) + f(v))``.

    Not a difference term, so a form containing one is in general *not*
    compatible with normal contractions.  Used to build negative controls.
    """

    u: str
    v: str
    w: ScalarConvex


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # keep the smaller index as root so that class order is stable
            if rj < ri:
                ri, rj = rj, ri
            self.parent[rj] = ri

    def groups(self):
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values(), key=lambda g: g[0])


@dataclass(frozen=True, eq=False)
class NetworkForm:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    hyperedges: tuple[Hyperedge, ...] = ()
    dirichlet: tuple[str, ...] = ()
    identifications: tuple[tuple[str, ...], ...] = ()
    boundary_vertex: str | None = None
    sums: tuple[SumTerm, ...] = ()

    _index: dict = field(init=False, repr=False)
    _class_of: np.ndarray = field(init=False, repr=False)
    classes: tuple[tuple[str, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "hyperedges", tuple(
            Hyperedge(tuple(h.vertices), float(h.mu)) for h in self.hyperedges))
        object.__setattr__(self, "dirichlet", tuple(dict.fromkeys(self.dirichlet)))
        object.__setattr__(self, "identifications",
                           tuple(tuple(g) for g in self.identifications))
        object.__setattr__(self, "sums", tuple(self.sums))
        if len(set(verts)) != len(verts):
            raise ConstructionError("duplicate vertex labels")
        index = {v: i for i, v in enumerate(verts)}
        object.__setattr__(self, "_index", index)

        def known(label):
            if label not in index:
                raise UnknownVertex(f"unknown vertex {label!r}")
            return index[label]

        for e in self.edges:
            known(e.u), known(e.v)
            if e.u == e.v:
                raise SelfLoop(f"self-loop at {e.u!r}")
        for s in self.sums:
            known(s.u), known(s.v)
        for h in self.hyperedges:
            for v in h.vertices:
                known(v)
            if len(set(h.vertices)) < 2:
                raise SingletonHyperedge(f"hyperedge {h.vertices} has fewer than two vertices")
            if not (h.mu >= 0 and math.isfinite(h.mu)):
                raise ConstructionError(f"hyperedge weight must be >= 0, got {h.mu}")
        for v in self.dirichlet:
            known(v)
        if self.boundary_vertex is not None:
            known(self.boundary_vertex)
            if self.boundary_vertex in self.dirichlet:
                raise ConstructionError("the boundary vertex cannot be a Dirichlet vertex")
            touches = [e for e in self.edges if self.boundary_vertex in (e.u, e.v)]
            if touches or any(self.boundary_vertex in h.vertices for h in self.hyperedges):
                raise ConstructionError("no energy term may involve the boundary vertex")

        uf = _UnionFind(len(verts))
        for group in self.identifications:
            ids = [known(v) for v in group]
            if self.boundary_vertex in group and len(set(group)) > 1:
                raise ConstructionError("the boundary vertex cannot be identified")
            for j in ids[1:]:
                uf.union(ids[0], j)
        groups = uf.groups()
        class_of = np.empty(len(verts), dtype=int)
        for c, g in enumerate(groups):
            class_of[g] = c
        object.__setattr__(self, "_class_of", class_of)
        object.__setattr__(self, "classes", tuple(tuple(verts[i] for i in g) for g in groups))

    # --- coordinates ---------------------------------------------------

    @property
    def n(self) -> int:
        """Number of coordinate classes."""
        return len(self.classes)

    def class_of(self, label: str) -> int:
        if label not in self._index:
            raise UnknownVertex(f"unknown vertex {label!r}")
        return int(self._class_of[self._index[label]])

    def delta(self, label: str) -> np.ndarray:
        out = np.zeros(self.n)
        out[self.class_of(label)] = 1.0
        return out

    def vector(self, values: Mapping[str, float]) -> np.ndarray:
        """Coordinate vector from a ``label -> value`` mapping.

        Every class must be covered and identified labels must agree.
        """
        out = np.full(self.n, np.nan)
        for label, val in values.items():
            c = self.class_of(label)
            val = float(val)
            if not np.isnan(out[c]) and out[c] != val:
                raise DimensionMismatch(
                    f"identified vertices of class {self.classes[c]} got different values")
            out[c] = val
        missing = [self.classes[c][0] for c in np.flatnonzero(np.isnan(out))]
        if missing:
            raise DimensionMismatch(f"no value for vertices {missing}")
        return out

    def as_mapping(self, f) -> dict[str, float]:
        f = self._check(f)
        return {v: float(f[self._class_of[i]]) for i, v in enumerate(self.vertices)}

    @property
    def interior_vertices(self) -> tuple[str, ...]:
        """Vertices other than the boundary vertex."""
        return tuple(v for v in self.vertices if v != self.boundary_vertex)

    def _cls(self, labels) -> np.ndarray:
        return np.array([self.class_of(v) for v in labels], dtype=int)

    def _check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.ndim == 0 or f.shape[-1] != self.n:
            raise DimensionMismatch(
                f"expected {self.n} coordinates, got shape {f.shape}")
        return f

    # --- evaluation ----------------------------------------------------

    def shifted(self, f: np.ndarray) -> np.ndarray:
        """Values seen by the energy terms: ``f - f(boundary)`` if a boundary exists."""
        if self.boundary_vertex is None:
            return f
        return f - f[..., self.class_of(self.boundary_vertex)][..., None]

    def evaluate(self, f) -> float | np.ndarray:
        f = self._check(f)
        g = self.shifted(f)
        total = np.zeros(g.shape[:-1])
        for e in self.edges:
            total = total + e.w(g[..., self.class_of(e.u)] - g[..., self.class_of(e.v)])
        for s in self.sums:
            total = total + s.w(g[..., self.class_of(s.u)] + g[..., self.class_of(s.v)])
        for h in self.hyperedges:
            sub = g[..., self._cls(h.vertices)]
            total = total + h.mu * (sub.max(axis=-1) - sub.min(axis=-1)) ** 2
        if self.dirichlet:
            bad = np.any(g[..., self._cls(self.dirichlet)] != 0.0, axis=-1)
            total = np.where(bad, np.inf, total)
        return float(total) if total.ndim == 0 else total

    __call__ = evaluate

    def subgradient(self, f) -> np.ndarray:
        """One element of the subdifferential at ``f`` (see module docs for tie rules)."""
        f = self._check(f)
        if f.ndim != 1:
            raise DimensionMismatch("subgradient takes a single vector")
        if not math.isfinite(self.evaluate(f)):
            raise InfiniteEnergy("energy is infinite at this point")
        g = self.shifted(f)
        out = np.zeros(self.n)

        def pick(w, t):
            lo, hi = w.subdifferential(float(t))
            return 0.0 if lo <= 0.0 <= hi else lo

        for e in self.edges:
            cu, cv = self.class_of(e.u), self.class_of(e.v)
            s = pick(e.w, g[cu] - g[cv])
            out[cu] += s
            out[cv] -= s
        for st in self.sums:
            cu, cv = self.class_of(st.u), self.class_of(st.v)
            s = pick(st.w, g[cu] + g[cv])
            out[cu] += s
            out[cv] += s
        for h in self.hyperedges:
            idx = self._cls(h.vertices)
            sub = g[idx]
            spread = sub.max() - sub.min()
            if spread > 0:
                out[idx[np.argmax(sub)]] += 2 * h.mu * spread
                out[idx[np.argmin(sub)]] -= 2 * h.mu * spread
        if self.boundary_vertex is not None:
            b = self.class_of(self.boundary_vertex)
            out[b] -= out.sum() - out[b]
        return out

    # --- structure -----------------------------------------------------

    def _links(self):
        """Pairs of coordinate classes tied together by some nonzero term."""
        for e in self.edges:
            if not e.w.is_zero():
                yield self.class_of(e.u), self.class_of(e.v)
        for s in self.sums:
            if not s.w.is_zero():
                yield self.class_of(s.u), self.class_of(s.v)
        for h in self.hyperedges:
            if h.mu > 0:
                idx = self._cls(h.vertices)
                for j in idx[1:]:
                    yield int(idx[0]), int(j)

    def flat_components(self, anchored: Iterable[int] = ()) -> list[np.ndarray]:
        """Coordinate sets ``C`` along whose indicator the energy is constant.

        Classes in ``anchored`` are treated as tied to a fixed reference, as
        are Dirichlet vertices (to zero, or to the boundary vertex) and
        endpoints of sum terms.
        """
        ground = self.n
        uf = _UnionFind(self.n + 1)
        for a, b in self._links():
            uf.union(a, b)
        for s in self.sums:
            if not s.w.is_zero():
                uf.union(self.class_of(s.u), ground)
        anchor = ground if self.boundary_vertex is None else self.class_of(self.boundary_vertex)
        for v in self.dirichlet:
            uf.union(self.class_of(v), anchor)
        for c in anchored:
            uf.union(int(c), ground)
        return [np.array(g) for g in uf.groups() if ground not in g]

    def connectivity_report(self) -> list[list[str]]:
        """Connected components of the vertex graph induced by nonzero terms."""
        uf = _UnionFind(self.n)
        for a, b in self._links():
            uf.union(a, b)
        comps = []
        for g in uf.groups():
            members = set(g)
            comps.append([v for v in self.vertices if self.class_of(v) in members])
        return comps

    def exponents(self) -> set:
        """Homogeneity exponents of all terms (``None`` for non-homogeneous ones)."""
        out = {e.w.exponent for e in self.edges if not e.w.is_zero()}
        out |= {s.w.exponent for s in self.sums if not s.w.is_zero()}
        if any(h.mu > 0 for h in self.hyperedges):
            out.add(2.0)
        return out


# --- builders --------------------------------------------------------------

def _as_edge(e) -> Edge:
    return e if isinstance(e, Edge) else Edge(str(e[0]), str(e[1]), e[2])


def _as_hyperedge(h) -> Hyperedge:
    return h if isinstance(h, Hyperedge) else Hyperedge(tuple(str(v) for v in h[0]), float(h[1]))


def build_graph_form(vertices, edges) -> NetworkForm:
    """Form ``E(f) = sum_edges w(f(u) - f(v))`` from ``(u, v, w)`` triples."""
    return NetworkForm(tuple(vertices), edges=tuple(_as_edge(e) for e in edges))


def build_hypergraph_form(vertices, hyperedges) -> NetworkForm:
    """Form ``E(f) = sum mu(K) (max_K f - min_K f)^2`` from ``(K, mu)`` pairs."""
    return NetworkForm(tuple(vertices), hyperedges=tuple(_as_hyperedge(h) for h in hyperedges))


def restrict_dirichlet(form: NetworkForm, F) -> NetworkForm:
    F = tuple(F)
    for v in F:
        form.class_of(v)
    if form.boundary_vertex is not None and F:
        raise ConstructionError("impose Dirichlet conditions before adjoining a boundary point")
    return replace(form, dirichlet=tuple(dict.fromkeys(form.dirichlet + F)))


def adjoin_boundary_point(form: NetworkForm, label: str = BOUNDARY_LABEL) -> NetworkForm:
    if form.boundary_vertex is not None:
        raise BoundaryAlreadyPresent(f"form already has boundary vertex {form.boundary_vertex!r}")
    if label in form._index:
        raise ConstructionError(f"label {label!r} is already a vertex")
    return replace(form, vertices=form.vertices + (label,), boundary_vertex=label)


def relabel(form: NetworkForm, mapping: Mapping[str, str]) -> NetworkForm:
    m = lambda v: mapping.get(v, v)  # noqa: E731
    return NetworkForm(
        tuple(m(v) for v in form.vertices),
        edges=tuple(Edge(m(e.u), m(e.v), e.w) for e in form.edges),
        hyperedges=tuple(Hyperedge(tuple(m(v) for v in h.vertices), h.mu)
                         for h in form.hyperedges),
        dirichlet=tuple(m(v) for v in form.dirichlet),
        identifications=tuple(tuple(m(v) for v in g) for g in form.identifications),
        boundary_vertex=None if form.boundary_vertex is None else m(form.boundary_vertex),
        sums=tuple(SumTerm(m(s.u), m(s.v), s.w) for s in form.sums),
    )


def disjoint_labels(form1: NetworkForm, form2: NetworkForm) -> tuple[NetworkForm, dict]:
    """Rename colliding labels of ``form2`` by appending primes.

    Returns the renamed form and the full old-to-new label mapping.
    """
    taken = set(form1.vertices) | set(form2.vertices)
    mapping = {}
    for v in form2.vertices:
        new = v
        if v in form1._index:
            while new in taken:
                new += "'"
            taken.add(new)
        mapping[v] = new
    return relabel(form2, mapping), mapping


def _check_operand(form: NetworkForm):
    if form.dirichlet or form.boundary_vertex is not None:
        raise DirichletOperand("serial composition needs operands without Dirichlet "
                               "vertices or boundary point")


def series_identify(form1: NetworkForm, xi1: str, form2: NetworkForm, xi2: str) -> NetworkForm:
    """Disjoint union of two forms with ``xi1`` and ``xi2`` merged into one coordinate.

    Colliding labels of ``form2`` are renamed as in :func:`disjoint_labels`.
    """
    _check_operand(form1)
    _check_operand(form2)
    form1.class_of(xi1)
    form2.class_of(xi2)
    form2, mapping = disjoint_labels(form1, form2)
    return _union(form1, form2, ((xi1, mapping[xi2]),))


def series_resistor(form1: NetworkForm, xi1: str, form2: NetworkForm, xi2: str,
                    eps: float) -> NetworkForm:
    """Disjoint union joined by the connector ``|f(xi1) - f(xi2)|^2 / (4 eps)``."""
    if not eps > 0:
        raise NonPositiveEpsilon(f"eps must be > 0, got {eps}")
    _check_operand(form1)
    _check_operand(form2)
    form1.class_of(xi1)
    form2.class_of(xi2)
    form2, mapping = disjoint_labels(form1, form2)
    glued = _union(form1, form2, ())
    connector = Edge(xi1, mapping[xi2], ScaledPower(1.0 / (2.0 * eps), 2.0))
    return replace(glued, edges=glued.edges + (connector,))


def _union(a: NetworkForm, b: NetworkForm, extra_ids) -> NetworkForm:
    return NetworkForm(
        a.vertices + b.vertices,
        edges=a.edges + b.edges,
        hyperedges=a.hyperedges + b.hyperedges,
        identifications=a.identifications + b.identifications + tuple(extra_ids),
        sums=a.sums + b.sums,
    )


def evaluate(form: NetworkForm, f) -> float | np.ndarray:
    return form.evaluate(f)


def subgradient(form: NetworkForm, f) -> np.ndarray:
    return form.subgradient(f)


def connectivity_report(form: NetworkForm) -> list[list[str]]:
    return form.connectivity_report()
