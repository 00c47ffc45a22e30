"""JSON network and vector files.

Network file::

    {
      "vertices": ["x", "y", "z"],
      "edges": [{"u": "x", "v": "y", "w": {"kind": "power", "c": 2.0, "p": 2.0}}],
      "hyperedges": [{"vertices": ["x", "y", "z"], "mu": 1.0}],
      "dirichlet": ["z"],
      "identify": [["x", "z"]],
      "boundary": true,
      "sums": [{"u": "x", "v": "y", "w": {...}}]
    }

Only ``vertices`` is required.  ``boundary`` adjoins a boundary vertex
(labelled ``"Δ"``, or the given string) after the Dirichlet conditions are
imposed; it is not listed in ``vertices``.  ``sums`` holds non-difference
terms ``w(f(u) + f(v))`` and exists for negative controls only.

Each edge is counted once: an ordered-pair weight ``b`` symmetric in the
two endpoints corresponds to ``c = 2 b`` in a ``power`` term.

A vector file is a JSON object ``{label: value}`` covering every
coordinate class.
"""
from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .convex import scalar_from_dict
from .errors import ConstructionError, ParseError, UnknownVertex
from .forms import BOUNDARY_LABEL, Edge, Hyperedge, NetworkForm, SumTerm, adjoin_boundary_point

__all__ = [
    "parse_network", "load_network", "network_to_dict", "dumps_network",
    "parse_vector", "load_vector", "encode_ext", "round_sig", "format_scalar",
    "dumps_json", "write_atomic",
]

_KNOWN_KEYS = {"vertices", "edges", "hyperedges", "dirichlet", "identify", "boundary", "sums"}


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def _labels(value, path):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError("expected a list of vertex labels", field=path)
    return tuple(value)


def _pair_terms(items, path):
    if not isinstance(items, list):
        raise ParseError("expected a list", field=path)
    out = []
    for i, item in enumerate(items):
        where = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise ParseError("expected an object", field=where)
        for key in ("u", "v", "w"):
            if key not in item:
                raise ParseError(f"missing key {key!r}", field=where)
        if not isinstance(item["u"], str) or not isinstance(item["v"], str):
            raise ParseError("endpoints must be labels", field=where)
        out.append((item["u"], item["v"], scalar_from_dict(item["w"], where + ".w")))
    return out


def parse_network(text: str) -> NetworkForm:
    """Parse a network document; every failure is a :class:`ParseError`."""
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ParseError(f"unknown key {sorted(unknown)[0]!r}", field=sorted(unknown)[0])
    if "vertices" not in doc:
        raise ParseError("missing key 'vertices'", field="vertices")
    vertices = _labels(doc["vertices"], "vertices")
    edges = [Edge(u, v, w) for u, v, w in _pair_terms(doc.get("edges", []), "edges")]
    sums = [SumTerm(u, v, w) for u, v, w in _pair_terms(doc.get("sums", []), "sums")]
    hyper = []
    raw = doc.get("hyperedges", [])
    if not isinstance(raw, list):
        raise ParseError("expected a list", field="hyperedges")
    for i, h in enumerate(raw):
        where = f"hyperedges[{i}]"
        if not isinstance(h, dict) or "vertices" not in h or "mu" not in h:
            raise ParseError("expected an object with 'vertices' and 'mu'", field=where)
        mu = h["mu"]
        if isinstance(mu, bool) or not isinstance(mu, (int, float)):
            raise ParseError("mu must be a number", field=where + ".mu")
        hyper.append(Hyperedge(_labels(h["vertices"], where + ".vertices"), float(mu)))
    dirichlet = _labels(doc.get("dirichlet", []), "dirichlet")
    raw = doc.get("identify", [])
    if not isinstance(raw, list):
        raise ParseError("expected a list of label groups", field="identify")
    ids = tuple(_labels(g, f"identify[{i}]") for i, g in enumerate(raw))
    boundary = doc.get("boundary", False)
    if not isinstance(boundary, (bool, str)):
        raise ParseError("boundary must be true, false or a label", field="boundary")
    try:
        form = NetworkForm(vertices, tuple(edges), tuple(hyper), dirichlet, ids, sums=tuple(sums))
        if boundary:
            form = adjoin_boundary_point(
                form, BOUNDARY_LABEL if boundary is True else boundary)
    except UnknownVertex as exc:
        raise ParseError(str(exc)) from None
    except ConstructionError as exc:
        raise ParseError(str(exc)) from None
    return form


def load_network(path) -> NetworkForm:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def network_to_dict(form: NetworkForm) -> dict:
    """Inverse of :func:`parse_network`, with empty sections omitted."""
    out: dict = {"vertices": list(form.interior_vertices)}
    if form.edges:
        out["edges"] = [{"u": e.u, "v": e.v, "w": e.w.to_dict()} for e in form.edges]
    if form.hyperedges:
        out["hyperedges"] = [{"vertices": list(h.vertices), "mu": h.mu} for h in form.hyperedges]
    if form.dirichlet:
        out["dirichlet"] = list(form.dirichlet)
    if form.identifications:
        out["identify"] = [list(g) for g in form.identifications]
    if form.boundary_vertex is not None:
        out["boundary"] = True if form.boundary_vertex == BOUNDARY_LABEL else form.boundary_vertex
    if form.sums:
        out["sums"] = [{"u": s.u, "v": s.v, "w": s.w.to_dict()} for s in form.sums]
    return out


def dumps_network(form: NetworkForm) -> str:
    return json.dumps(network_to_dict(form), indent=2, ensure_ascii=False) + "\n"


def parse_vector(text: str, form: NetworkForm) -> np.ndarray:
    """Vector file to coordinate array (raises ``UnknownVertex``/``DimensionMismatch``)."""
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("vector file must be an object mapping labels to numbers")
    for label, val in doc.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError("value must be a number", field=label)
    return form.vector(doc)


def load_vector(path, form: NetworkForm) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_vector(fh.read(), form)


# --- extended reals in output ----------------------------------------------

def round_sig(v: float, digits: int = 10) -> float:
    """Round to ``digits`` significant digits; ``-0.0`` becomes ``0.0``."""
    if not math.isfinite(v):
        return v
    r = float(f"{v:.{digits}g}")
    return 0.0 if r == 0 else r


def encode_ext(v, digits: int = 10):
    """JSON value of an extended real: a number, or ``{"inf": true}``."""
    v = float(v)
    if math.isinf(v):
        return {"inf": True} if v > 0 else {"inf": True, "negative": True}
    if math.isnan(v):
        return {"nan": True}
    return round_sig(v, digits)


def format_scalar(v, digits: int = 10) -> str:
    """CSV/plain text rendering: ``inf`` or the shortest repr of the rounded value."""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return repr(round_sig(v, digits))


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded(v) for v in obj]
    if isinstance(obj, float):
        return encode_ext(obj)
    return obj


def dumps_json(obj) -> str:
    """Deterministic JSON with floats rounded and infinities encoded."""
    return json.dumps(_rounded(obj), indent=2, ensure_ascii=False) + "\n"


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".reslab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
