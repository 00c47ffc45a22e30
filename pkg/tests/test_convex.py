import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reslab.convex import (
    Capped, CoshMinusOne, FoldAt, Identity, MinWith, Negate, PiecewiseLinear, ScaledPower,
    apply_contraction, contraction_from_dict, eval_scalar, numeric_conjugate,
    random_piecewise_linear, scalar_conjugate, scalar_from_dict, scalar_subdifferential,
)
from reslab.errors import ConstructionError, DomainBoundary, ParseError

reals = st.floats(-20, 20, allow_nan=False)
unit = st.floats(0, 1)

scalars = st.one_of(
    st.builds(ScaledPower, st.floats(0.1, 4), st.sampled_from([1.0, 1.5, 2.0, 3.0])),
    st.builds(CoshMinusOne, st.floats(0.1, 4)),
    st.builds(Capped, st.builds(ScaledPower, st.floats(0.1, 4), st.sampled_from([1.0, 2.0])),
              st.floats(0.5, 5)),
)


def test_eval_examples():
    assert eval_scalar(ScaledPower(2, 2), 3) == 9
    assert eval_scalar(Capped(ScaledPower(1, 2), 1), 2) == math.inf
    for w in (ScaledPower(3, 1.5), CoshMinusOne(2), Capped(ScaledPower(1, 2), 1)):
        assert eval_scalar(w, 0) == 0


def test_subdifferential_examples():
    assert scalar_subdifferential(ScaledPower(1, 1), 0) == (-1, 1)
    assert scalar_subdifferential(ScaledPower(2, 2), 3) == (6, 6)
    assert scalar_subdifferential(CoshMinusOne(1), 0) == (0, 0)
    with pytest.raises(DomainBoundary):
        scalar_subdifferential(Capped(ScaledPower(1, 2), 1), 1)


def test_conjugate_examples():
    assert scalar_conjugate(ScaledPower(1, 2), 1) == pytest.approx(0.5)
    assert scalar_conjugate(ScaledPower(1, 1), 0.5) == 0
    assert scalar_conjugate(ScaledPower(1, 1), 2) == math.inf
    for w in (ScaledPower(3, 1.5), CoshMinusOne(2), Capped(ScaledPower(1, 2), 1)):
        assert scalar_conjugate(w, 0) == 0


def test_cosh_conjugate_matches_numeric():
    w = CoshMinusOne(1.7)
    for s in (-5.0, -0.3, 0.01, 1.0, 12.0):
        assert w.conjugate(s) == pytest.approx(numeric_conjugate(w, s, 30.0), rel=1e-9, abs=1e-12)


def test_capped_conjugate_is_linear_beyond_cap():
    # sup over |t| <= 1 of s t - t^2/2 is s - 1/2 once s >= 1
    w = Capped(ScaledPower(1, 2), 1)
    assert w.conjugate(3.0) == pytest.approx(2.5)
    assert w.conjugate(0.5) == pytest.approx(0.125)


def test_contraction_examples():
    np.testing.assert_array_equal(apply_contraction(MinWith(1), [0.5, 2.0]), [0.5, 1.0])
    np.testing.assert_array_equal(apply_contraction(FoldAt(1), [0.0, 2.0]), [0.0, 0.0])
    f = np.array([-1.5, 0.0, 4.0])
    np.testing.assert_array_equal(apply_contraction(Identity(), f), f)
    np.testing.assert_array_equal(apply_contraction(Negate(), f), -f)


def test_piecewise_linear_construction():
    C = PiecewiseLinear((-1.0, 2.0), (0.5, 1.0, -0.25))
    assert C(0.0) == 0
    assert C(2.0) == pytest.approx(2.0)
    assert C(3.0) == pytest.approx(1.75)
    assert C(-3.0) == pytest.approx(-2.0)
    with pytest.raises(ConstructionError):
        PiecewiseLinear((0.0,), (1.5, 0.0))
    with pytest.raises(ConstructionError):
        PiecewiseLinear.from_points([-1.0, 1.0], [0.5, 1.0])
    D = PiecewiseLinear.from_points([-1.0, 0.0, 2.0], [-1.0, 0.0, 1.0])
    assert D(4.0) == pytest.approx(2.0)


def test_serialization_round_trip():
    for w in (ScaledPower(2, 2), CoshMinusOne(0.5), Capped(ScaledPower(1, 1.5), 3)):
        assert scalar_from_dict(w.to_dict()) == w
    for C in (Identity(), Negate(), MinWith(2.0), FoldAt(-1.0),
              PiecewiseLinear((0.5,), (1.0, -1.0))):
        assert contraction_from_dict(C.to_dict()) == C
    with pytest.raises(ParseError, match="edges"):
        scalar_from_dict({"kind": "power", "c": 1.0}, "edges[0].w")
    with pytest.raises(ParseError):
        scalar_from_dict({"kind": "spline"})


def test_invalid_parameters():
    with pytest.raises(ConstructionError):
        ScaledPower(1, 0.5)
    with pytest.raises(ConstructionError):
        ScaledPower(-1, 2)
    with pytest.raises(ConstructionError):
        Capped(ScaledPower(1, 2), 0)
    with pytest.raises(ConstructionError):
        MinWith(0)


@given(scalars, reals, unit)
def test_star_shaped(w, t, lam):
    if lam == 0:
        assert w(0.0) == 0
        return
    assert w(lam * t) <= lam * w(t) + 1e-12 * (1 + abs(float(w(t))))


@given(scalars, reals)
def test_symmetric(w, t):
    assert w(t) == w(-t)


@given(scalars, reals, reals)
def test_fenchel_young(w, t, s):
    lhs = s * t
    rhs = float(w(t)) + float(w.conjugate(s))
    assert lhs <= rhs + 1e-9 * (1 + abs(lhs))


@given(scalars, st.floats(-4, 4))
def test_fenchel_young_equality_on_subgradient(w, t):
    if isinstance(w, Capped) and abs(t) >= w.cap:
        return
    lo, hi = w.subdifferential(t)
    for s in {lo, hi}:
        assert s * t == pytest.approx(float(w(t)) + float(w.conjugate(s)), rel=1e-7, abs=1e-9)


@given(scalars, reals, reals, st.floats(-1, 1))
def test_two_point_lemma(w, x, y, lam):
    lhs = w(x + lam * y) + w(x - lam * y)
    rhs = w(x + y) + w(x - y)
    assert lhs <= rhs + 1e-9 * (1 + abs(float(rhs)))


@settings(max_examples=50)
@given(st.floats(0.2, 5), st.floats(1.2, 4), st.floats(-3, 3))
def test_conjugate_round_trip(c, p, t):
    w = ScaledPower(c, p)
    back = numeric_conjugate(w.conjugate_function(), t, 200.0)
    assert back == pytest.approx(float(w(t)), abs=1e-6)


@given(st.integers(0, 2**32 - 1), reals, reals)
def test_random_contractions_are_normal(seed, s, t):
    rng = np.random.default_rng(seed)
    for C in (random_piecewise_linear(rng), MinWith(3 * (1 - rng.random())),
              FoldAt(rng.uniform(-3, 3))):
        assert C(0.0) == 0
        assert abs(C(s) - C(t)) <= abs(s - t) + 1e-12 * (1 + abs(s) + abs(t))
