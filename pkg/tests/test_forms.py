import math

import numpy as np
import pytest

from corpus import CORPUS, P2, edge_p2, hyper_mixed, path_p2
from reslab import (
    Capped, Edge, NetworkForm, ScaledPower, adjoin_boundary_point, build_graph_form,
    build_hypergraph_form, restrict_dirichlet, series_identify, series_resistor,
)
from reslab.convex import FoldAt, MinWith, random_piecewise_linear
from reslab.errors import (
    BoundaryAlreadyPresent, DimensionMismatch, DirichletOperand, InfiniteEnergy,
    NonPositiveEpsilon, SelfLoop, SingletonHyperedge, UnknownVertex,
)
from reslab.forms import connectivity_report, disjoint_labels, evaluate, subgradient


def test_graph_form_examples():
    assert edge_p2()([1.0, 0.0]) == 1.0
    assert path_p2()([1.0, 0.0, -1.0]) == 2.0
    for make in CORPUS.values():
        form = make()
        assert form(np.zeros(form.n)) == 0.0


def test_graph_form_errors():
    with pytest.raises(UnknownVertex):
        build_graph_form("xy", [("x", "z", P2)])
    with pytest.raises(SelfLoop):
        build_graph_form("xy", [("x", "x", P2)])


def test_hypergraph_examples():
    form = build_hypergraph_form("abc", [("abc", 1.0)])
    assert form([1.0, 0.0, 0.0]) == 1.0
    assert form([2.0, 0.0, -1.0]) == 9.0
    assert form([3.0, 3.0, 3.0]) == 0.0
    with pytest.raises(SingletonHyperedge):
        build_hypergraph_form("ab", [("a", 1.0)])
    with pytest.raises(UnknownVertex):
        build_hypergraph_form("ab", [("az", 1.0)])


def test_dirichlet():
    form = edge_p2()
    assert restrict_dirichlet(form, ())([1.0, 0.5]) == form([1.0, 0.5])
    dir_y = restrict_dirichlet(form, ["y"])
    assert dir_y([1.0, 0.5]) == math.inf
    assert dir_y([1.0, 0.0]) == 1.0
    with pytest.raises(UnknownVertex):
        restrict_dirichlet(form, ["q"])


def test_boundary_point():
    form = adjoin_boundary_point(edge_p2())
    assert form.vertices == ("x", "y", "Δ")
    assert form(form.vector({"x": 2.0, "y": 1.0, "Δ": 1.0})) == 1.0
    assert form(form.vector({"x": 2.0, "y": 0.0, "Δ": 0.0})) == edge_p2()([2.0, 0.0])
    assert form([5.0, 5.0, 5.0]) == 0.0
    with pytest.raises(BoundaryAlreadyPresent):
        adjoin_boundary_point(form)


def test_boundary_with_dirichlet_shifts_the_condition():
    form = adjoin_boundary_point(restrict_dirichlet(path_p2(), ["c"]))
    # c must equal the boundary value, not zero
    assert form(form.vector({"a": 3.0, "b": 2.0, "c": 2.0, "Δ": 2.0})) == 1.0
    assert form(form.vector({"a": 3.0, "b": 2.0, "c": 0.0, "Δ": 2.0})) == math.inf


def test_series_identify():
    e1 = build_graph_form(["x1", "y1"], [("x1", "y1", P2)])
    e2 = build_graph_form(["x2", "y2"], [("x2", "y2", P2)])
    glued = series_identify(e1, "y1", e2, "x2")
    assert glued.n == 3
    assert glued(glued.vector({"x1": 1.0, "y1": 0.0, "x2": 0.0, "y2": -1.0})) == 2.0
    assert glued(np.full(3, 4.2)) == 0.0


def test_series_identify_relabels_collisions():
    glued = series_identify(edge_p2(), "y", edge_p2(), "x")
    assert glued.vertices == ("x", "y", "x'", "y'")
    assert glued.class_of("y") == glued.class_of("x'")
    _, mapping = disjoint_labels(edge_p2(), edge_p2())
    assert mapping == {"x": "x'", "y": "y'"}


def test_series_resistor():
    e1 = build_graph_form(["x1", "xi1"], [("x1", "xi1", P2)])
    e2 = build_graph_form(["xi2", "x2"], [("xi2", "x2", P2)])
    g = series_resistor(e1, "xi1", e2, "xi2", 1.0)
    assert g(g.vector({"x1": 2.0, "xi1": 1.0, "xi2": 0.0, "x2": 0.0})) == pytest.approx(1.25)
    g = series_resistor(e1, "xi1", e2, "xi2", 0.25)
    assert g(g.vector({"x1": 0.0, "xi1": 3.0, "xi2": 1.0, "x2": 1.0})) == pytest.approx(9 + 4)
    assert g(g.vector({"x1": 0.0, "xi1": 1.0, "xi2": 1.0, "x2": 1.0})) == pytest.approx(1)
    with pytest.raises(NonPositiveEpsilon):
        series_resistor(e1, "xi1", e2, "xi2", 0.0)
    with pytest.raises(UnknownVertex):
        series_resistor(e1, "nope", e2, "xi2", 1.0)


def test_series_rejects_dirichlet_operands():
    with pytest.raises(DirichletOperand):
        series_identify(restrict_dirichlet(edge_p2(), ["y"]), "x", edge_p2(), "x")
    with pytest.raises(DirichletOperand):
        series_resistor(edge_p2(), "x", adjoin_boundary_point(edge_p2()), "x", 1.0)


def test_series_identify_energy_is_sum_of_parts():
    a, b = path_p2(), hyper_mixed()
    glued = series_identify(a, "c", b, "a")
    rng = np.random.default_rng(3)
    _, mapping = disjoint_labels(a, b)
    for _ in range(20):
        f = rng.standard_normal(glued.n)
        m = glued.as_mapping(f)
        fa = a.vector({v: m[v] for v in a.vertices})
        fb = b.vector({v: m[mapping[v]] for v in b.vertices})
        assert glued(f) == pytest.approx(a(fa) + b(fb), rel=1e-14)


def test_evaluate_errors_and_capped():
    form = edge_p2()
    with pytest.raises(DimensionMismatch):
        evaluate(form, [1.0, 2.0, 3.0])
    capped = build_graph_form("xy", [("x", "y", Capped(ScaledPower(1, 2), 1))])
    assert capped([3.0, 0.0]) == math.inf


def test_mixed_form_is_sum_of_parts():
    mixed = hyper_mixed()
    f = np.array([0.3, -1.0, 2.0, 0.5])
    edge_part = ScaledPower(1.0, 1.5)(1.5)
    hyper_part = 0.5 * 3.0 ** 2
    assert mixed(f) == pytest.approx(edge_part + hyper_part)


def test_batched_evaluation_matches_single():
    form = CORPUS["mixed_five"]()
    F = np.random.default_rng(0).standard_normal((7, form.n))
    np.testing.assert_allclose(form(F), [form(f) for f in F])


def test_identification_merges_coordinates():
    form = CORPUS["identified_star"]()
    assert form.n == 3
    assert form.class_of("b") == form.class_of("d")
    with pytest.raises(DimensionMismatch):
        form.vector({"a": 0.0, "b": 1.0, "c": 0.0, "d": 2.0})


def test_subgradient_examples():
    np.testing.assert_allclose(subgradient(edge_p2(), [1.0, 0.0]), [2.0, -2.0])
    for make in CORPUS.values():
        form = make()
        np.testing.assert_array_equal(form.subgradient(np.zeros(form.n)), 0.0)
    p1 = build_graph_form("xy", [("x", "y", ScaledPower(1, 1))])
    np.testing.assert_array_equal(p1.subgradient([0.3, 0.3]), [0.0, 0.0])
    capped = build_graph_form("xy", [("x", "y", Capped(ScaledPower(1, 2), 1))])
    with pytest.raises(InfiniteEnergy):
        capped.subgradient([3.0, 0.0])


def test_hyperedge_subgradient_tie_breaks_low_index():
    form = build_hypergraph_form("abc", [("abc", 1.0)])
    np.testing.assert_allclose(form.subgradient([1.0, 1.0, 0.0]), [2.0, 0.0, -2.0])


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_subgradient_inequality(name):
    form = CORPUS[name]()
    rng = np.random.default_rng(1)
    for _ in range(50):
        f, g = rng.standard_normal((2, form.n)) * 0.5
        if not (math.isfinite(form(f)) and math.isfinite(form(g))):
            continue
        s = form.subgradient(f)
        assert form(g) >= form(f) + s @ (g - f) - 1e-9 * (1 + form(g))


def test_boundary_subgradient_sums_to_zero():
    form = adjoin_boundary_point(path_p2())
    s = form.subgradient([1.0, 0.5, -2.0, 0.25])
    assert s.sum() == pytest.approx(0.0)


def test_connectivity_report():
    assert connectivity_report(path_p2()) == [["a", "b", "c"]]
    two = build_graph_form("abcd", [("a", "b", P2), ("c", "d", P2)])
    assert two.connectivity_report() == [["a", "b"], ["c", "d"]]
    hyper = build_hypergraph_form("abcd", [("abc", 0.5)])
    assert hyper.connectivity_report() == [["a", "b", "c"], ["d"]]
    zero = NetworkForm(("a", "b"), edges=(Edge("a", "b", ScaledPower(0.0, 2.0)),))
    assert zero.connectivity_report() == [["a"], ["b"]]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_convex_symmetric_shift_invariant(name):
    form = CORPUS[name]()
    rng = np.random.default_rng(7)
    F, G = rng.standard_normal((2, 200, form.n))
    lam = rng.random((200, 1))
    mix = form(lam * F + (1 - lam) * G)
    bound = lam[:, 0] * form(F) + (1 - lam[:, 0]) * form(G)
    ok = np.isinf(bound) | (mix <= bound + 1e-9 * (1 + np.abs(np.where(np.isinf(bound), 0, bound))))
    assert ok.all()
    np.testing.assert_array_equal(form(-F), form(F))
    np.testing.assert_allclose(form(F + 3.7), form(F), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_normal_contractions_operate(name):
    form = CORPUS[name]()
    rng = np.random.default_rng(11)
    for i in range(300):
        f, g = rng.standard_normal((2, form.n)) * (0.1, 1.0, 10.0)[i % 3]
        C = (MinWith(3 * (1 - rng.random())), FoldAt(rng.uniform(-3, 3)),
             random_piecewise_linear(rng))[i % 3]
        lhs = form(f + C(g)) + form(f - C(g))
        rhs = form(f + g) + form(f - g)
        assert lhs <= rhs + 1e-9 * (1 + abs(rhs)) or math.isinf(rhs)
