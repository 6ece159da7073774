import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multinorms.spaces import (DiscreteSpace, Exponent, MultiVector, Vector,
                               conjugate, lp_norm, multivector_from_json,
                               multivector_to_json, pairing, scale_by)

from conftest import mv, unit_space


class TestExponent:
    def test_conjugate_fixed_point(self):
        assert conjugate(2) == Exponent(2)

    def test_conjugate_of_one_is_inf(self):
        assert conjugate(1).is_inf

    def test_conjugate_of_inf_is_one(self):
        assert conjugate("inf") == Exponent(1)

    def test_conjugate_three(self):
        assert conjugate(3) == Exponent(1.5)

    def test_rejects_below_one(self):
        with pytest.raises(ValueError):
            Exponent(0.5)
        with pytest.raises(ValueError):
            Exponent(0)

    def test_involution_on_grid(self):
        # 50 exponents spread over [1, inf]
        grid = [Exponent(1), Exponent("inf")]
        grid += [Exponent(1 + Fraction(k, 7)) for k in range(1, 25)]
        grid += [Exponent(float(v)) for v in np.linspace(1.01, 40.0, 24)]
        assert len(grid) == 50
        for p in grid:
            assert p.conjugate().conjugate() == p

    def test_reciprocal_sum_is_one(self):
        for p in (Exponent(1), Exponent(1.5), Exponent(2), Exponent(7), Exponent("inf")):
            assert p.reciprocal() + p.conjugate().reciprocal() == 1

    def test_parse_inf_string(self):
        assert Exponent("inf").is_inf
        assert float(Exponent("inf")) == math.inf

    def test_multiplication(self):
        assert Exponent(2) * 3 == Exponent(6)
        assert (Exponent("inf") * 2).is_inf


class TestSpacesAndVectors:
    def test_space_validation(self):
        with pytest.raises(ValueError):
            DiscreteSpace((), np.array([]))
        with pytest.raises(ValueError):
            DiscreteSpace(("a", "a"), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            DiscreteSpace(("a", "b"), np.array([1.0, 0.0]))

    def test_vector_length_checked(self):
        sp = unit_space(2)
        with pytest.raises(ValueError):
            Vector(sp, np.array([1.0, 2.0, 3.0]))

    def test_pythagorean(self):
        sp = unit_space(2)
        f = Vector(sp, np.array([3.0, 4.0]))
        assert lp_norm(f, 2) == pytest.approx(5.0, abs=1e-12)

    def test_weighted_l1(self):
        sp = DiscreteSpace(("a", "b"), np.array([2.0, 3.0]))
        f = Vector(sp, np.array([1.0, 1.0]))
        assert lp_norm(f, 1) == pytest.approx(5.0, abs=1e-12)

    def test_sup_norm_ignores_weights(self):
        sp = DiscreteSpace(("a", "b"), np.array([2.0, 3.0]))
        f = Vector(sp, np.array([1.0, -2.0]))
        assert lp_norm(f, "inf") == pytest.approx(2.0, abs=1e-12)

    def test_doubling_weights_scales_norm(self, rng):
        vals = rng.standard_normal(5)
        w = rng.uniform(0.5, 2.0, 5)
        for p in (1.0, 1.5, 2.0, 3.0):
            a = lp_norm(Vector(DiscreteSpace(tuple(range(5)), w), vals), p)
            b = lp_norm(Vector(DiscreteSpace(tuple(range(5)), 2 * w), vals), p)
            assert b == pytest.approx(2 ** (1 / p) * a, rel=1e-12)


class TestScaleBy:
    def test_identity(self):
        x = mv([[1.0, 0.0], [0.0, 1.0]])
        y = scale_by([1.0, 1.0], x)
        assert np.array_equal(y.columns, x.columns)

    def test_zero(self):
        x = mv([[1.0, 2.0], [3.0, 4.0]])
        y = scale_by([0.0, 0.0], x)
        assert not np.any(y.columns)

    def test_componentwise(self):
        x = mv([[1.0, 0.0], [0.0, 1.0]])
        y = scale_by([2.0, -1.0], x)
        assert np.array_equal(y.columns, np.array([[2.0, 0.0], [0.0, -1.0]]))

    def test_length_mismatch(self):
        x = mv([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            scale_by([1.0], x)


@settings(max_examples=60, deadline=None)
@given(
    vals=st.lists(st.tuples(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
        st.floats(0.1, 5.0, allow_nan=False)), min_size=1, max_size=6),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]),
)
def test_hoelder_inequality(vals, p):
    f = np.array([v[0] for v in vals])
    g = np.array([v[1] for v in vals])
    w = np.array([v[2] for v in vals])
    sp = DiscreteSpace(tuple(range(len(vals))), w)
    pe = Exponent(p)
    lhs = abs(float(np.dot(w * f, g)))
    rhs = lp_norm(Vector(sp, f), pe) * lp_norm(Vector(sp, g), pe.conjugate())
    # p = inf drops the weights, so feed the weighted Hoelder the l1 side
    if pe.is_inf:
        rhs = lp_norm(Vector(sp, g), 1) * lp_norm(Vector(sp, f), "inf")
    assert lhs <= rhs * (1 + 1e-9) + 1e-12


def test_json_round_trip():
    doc = {"points": ["a", "b"], "weights": [1.0, 2.0],
           "vectors": [[1.0, 0.0], [0.0, 1.0]]}
    x = multivector_from_json(json.dumps(doc))
    assert x.space.points == ("a", "b")
    assert multivector_to_json(x) == doc


def test_json_defaults():
    x = multivector_from_json({"vectors": [[1.0, 2.0, 3.0]]})
    assert x.space.points == (0, 1, 2)
    assert np.array_equal(x.space.weights, np.ones(3))


def test_pairing_weighted():
    sp = DiscreteSpace(("a", "b"), np.array([2.0, 3.0]))
    f = Vector(sp, np.array([1.0, 1.0]))
    lam = Vector(sp, np.array([1.0, -1.0]))
    assert pairing(f, lam) == pytest.approx(-1.0, abs=1e-12)
