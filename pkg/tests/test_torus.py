"""Trigonometric polynomials on the circle and certified sign classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gahtorus.torus import TrigPoly, classify_sign, max_on_period

coef = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def poly(mean=0, cos=(), sin=()):
    return TrigPoly.from_json({"mean": mean, "cos": list(cos), "sin": list(sin)})


class TestTrigPoly:
    def test_evaluation(self):
        p = poly(1, [2], [0, 3])
        t = np.linspace(0, 6, 7)
        assert np.allclose(p(t), 1 + 2 * np.cos(t) + 3 * np.sin(2 * t))

    def test_json_round_trip(self):
        p = poly("1/2", [1.5], [0.25])
        q = TrigPoly.from_json(p.to_json())
        assert q == p and q.mean_param.is_exact

    def test_derivative(self):
        p = poly(0, [1, 0.5], [2])
        t = np.linspace(0, 2 * math.pi, 50)
        expected = -np.sin(t) - 2 * 0.5 * np.sin(2 * t) + 2 * np.cos(t)
        assert np.abs(p.derivative()(t) - expected).max() < 1e-13

    def test_antiderivative_keeps_mean_as_slope(self):
        p = poly(2, [1], [1])
        P = p.antiderivative()
        t = np.linspace(-3, 9, 40)
        expected = 2 * t + np.sin(t) + 1 - np.cos(t)
        assert np.abs(P(t) - expected).max() < 1e-13
        assert P(0.0) == 0.0

    @given(st.lists(coef, min_size=1, max_size=4), st.lists(coef, min_size=1, max_size=4),
           st.floats(-7, 7))
    def test_translate(self, cs, ss, t0):
        p = poly(0.5, cs, ss)
        t = np.linspace(0, 2 * math.pi, 17)
        assert np.abs(p.translate(t0)(t) - p(t + t0)).max() < 1e-11

    def test_oscillation_bounds_range(self):
        p = poly(0, [1], [1])
        v = p(np.linspace(0, 2 * math.pi, 1000))
        assert v.max() - v.min() <= p.oscillation() + 1e-12


class TestSign:
    @pytest.mark.parametrize("p, tag", [
        (poly(0, [], [1]), "ChangesSign"),
        (poly(2, [], [1]), "NonNegative"),
        (poly(-2, [1]), "NonPositive"),
        (poly(0), "IdenticallyZero"),
        (poly(1, [-1]), "NonNegative"),
    ])
    def test_tags(self, p, tag):
        assert classify_sign(p).tag == tag

    def test_tangency_reported(self):
        sc = classify_sign(poly(1, [-1]))
        assert sc.touches_zero

    def test_sign_change_witnesses_are_strict(self):
        p = poly(0.2, [0.3], [1, -0.4])
        sc = classify_sign(p)
        tm, tp = sc.witnesses
        assert p(tm) < 0 < p(tp)
        t0 = sc.crossing
        assert abs(p(t0)) < 1e-12
        assert p(t0 - 1e-6) < 0 < p(t0 + 1e-6)

    def test_crossing_of_minus_sine(self):
        assert abs(classify_sign(poly(0, [], [-1])).crossing - math.pi) < 1e-12

    @given(st.lists(coef, min_size=1, max_size=3), st.lists(coef, min_size=1, max_size=3), coef)
    @settings(max_examples=60, deadline=None)
    def test_agrees_with_dense_sampling(self, cs, ss, m):
        p = poly(m, cs, ss)
        v = p(np.linspace(0, 2 * math.pi, 20001))
        tag = classify_sign(p).tag
        if v.min() > 1e-6:
            assert tag == "NonNegative"
        elif v.max() < -1e-6:
            assert tag == "NonPositive"
        elif v.min() < -1e-6 and v.max() > 1e-6:
            assert tag == "ChangesSign"


class TestMaximum:
    def test_one_minus_cos(self):
        M, t = max_on_period(poly(1, [-1]))
        assert abs(M - 2) < 1e-14 and abs(t - math.pi) < 1e-10

    def test_antiderivative_of_sin2t(self):
        M, t = max_on_period(poly(0, [], [0, 1]).antiderivative())
        assert abs(M - 1) < 1e-14 and abs(t - math.pi / 2) < 1e-10

    def test_increasing_antiderivative_peaks_at_end(self):
        M, t = max_on_period(poly(1, [], [0.5]).antiderivative())
        assert abs(t - 2 * math.pi) < 1e-12 and abs(M - 2 * math.pi) < 1e-12
