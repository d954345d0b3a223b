"""Annotated numbers, exact quadratic arithmetic and lattice membership."""

import math
from fractions import Fraction

import pytest
from mpmath import mp
from hypothesis import given, settings
from hypothesis import strategies as st

from gahtorus.numbers import (ComplexParam, Generator, Lin, RealParam, continued_fraction,
                              convergents, in_lattice, in_z_plus_half_a_z, is_zero,
                              lacunary_key, quadratic_from_cf)
from oracles import convergents_of

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=60)


class TestContinuedFractions:
    def test_convergents_of_sqrt2(self):
        conv = [Fraction(p, q) for p, q in convergents([1, 2, 2, 2, 2])]
        assert conv == [1, Fraction(3, 2), Fraction(7, 5), Fraction(17, 12), Fraction(41, 29)]

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=8), st.integers(0, 5))
    def test_convergents_match_tail_evaluation(self, rest, a0):
        qs = [a0] + rest
        mine = [Fraction(p, q) for p, q in convergents(qs)]
        assert mine == convergents_of(qs)

    @given(st.fractions(min_value=0, max_value=20, max_denominator=500))
    def test_expansion_round_trip(self, x):
        qs = continued_fraction(x)
        p, q = list(convergents(qs))[-1]
        assert Fraction(p, q) == x


class TestQuadratic:
    def test_golden_ratio(self):
        g = quadratic_from_cf([], [1])
        assert g.r == Fraction(1, 2) and g.s == Fraction(1, 2)
        assert g.gen == Generator("sqrt", (5,))
        assert abs(g.approx() - (1 + math.sqrt(5)) / 2) < 1e-15

    def test_sqrt2_squares_to_two(self):
        r2 = quadratic_from_cf([1], [2])
        sq = r2 * r2
        assert sq.is_rational and sq.r == 2

    def test_sqrt_factor_is_squarefree(self):
        x = quadratic_from_cf([], [4])  # 2 + sqrt(5)
        assert x.gen.key == (5,)
        assert abs(x.approx() - (2 + math.sqrt(5))) < 1e-14

    @given(fractions, fractions, fractions, fractions)
    def test_field_arithmetic_matches_floats(self, r1, s1, r2, s2):
        g = Generator("sqrt", (7,))
        x, y = Lin(r1, s1, g), Lin(r2, s2, g)
        w = math.sqrt(7)
        fx, fy = float(r1) + float(s1) * w, float(r2) + float(s2) * w
        assert abs((x * y).approx() - fx * fy) < 1e-9 * max(1, abs(fx * fy))
        assert abs((x - y).approx() - (fx - fy)) < 1e-9 * max(1, abs(fx) + abs(fy))
        if not y.is_zero():
            assert abs((x / y).approx() - fx / fy) < 1e-8 * max(1, abs(fx / fy))

    def test_different_generators_do_not_multiply(self):
        x = Lin(Fraction(0), Fraction(1), Generator("sqrt", (2,)))
        y = Lin(Fraction(0), Fraction(1), Generator("sqrt", (3,)))
        assert x * y is None

    def test_interval_encloses_value(self):
        r2 = quadratic_from_cf([1], [2])
        iv = r2.interval()
        with mp.workprec(600):
            assert mp.mpf(iv.a) ** 2 <= 2 <= mp.mpf(iv.b) ** 2


class TestRealParam:
    def test_rational_string(self):
        p = RealParam.of("3/7")
        assert p.is_exact and p.is_rational and p.exact.r == Fraction(3, 7)

    def test_python_floats_are_inexact(self):
        p = RealParam.of(0.5)
        assert not p.is_exact and p.kind == "float"

    def test_spec_round_trip(self):
        spec = {"kind": "quadratic", "cf_preperiod": [0], "cf_period": [1]}
        p = RealParam.of(spec)
        assert p.to_spec() == spec
        assert RealParam.of(p.to_spec()) == p

    def test_lacunary_value(self):
        p = RealParam.of({"kind": "lacunary", "base": 2, "exponents": [1, 2]})
        assert abs(p.value - 0.75) < 1e-12
        iv = p.interval()
        assert float(iv.a) <= 0.75 + 2.0 ** -4 + 1e-15

    def test_tower_next_exponent(self):
        assert lacunary_key(2, [2, 4]) == (2, (2, 4), 16)
        with pytest.raises(ValueError):
            lacunary_key(2, [4, 2])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            RealParam.of({"kind": "transcendental"})

    def test_exact_arithmetic_stays_exact(self):
        x = RealParam.of("1/3") + RealParam.of("2/3")
        assert x.is_exact and x.exact.r == 1
        y = RealParam.of("1/3") + RealParam.of(0.1)
        assert not y.is_exact

    def test_complex_param_accepts_lists(self):
        z = ComplexParam.of([0, "1/2"])
        assert z.is_exact and z.value == 0.5j


class TestMembership:
    def test_zero(self):
        assert is_zero(RealParam.of(0)) == (True, True, None)
        assert is_zero(RealParam.of(1e-14)).result and not is_zero(RealParam.of(1e-14)).exact

    def test_half_lattice(self):
        d = in_lattice(RealParam.of("3/2"), Fraction(1, 2))
        assert d.result and d.exact and d.witness == (3,)
        assert not in_lattice(RealParam.of("1/3"), Fraction(1, 2)).result

    def test_irrational_never_in_lattice(self):
        d = in_lattice(RealParam.of({"kind": "quadratic", "cf_period": [1]}))
        assert d.result is False and d.exact

    @given(st.integers(-20, 20), st.integers(-20, 20), fractions)
    @settings(max_examples=200)
    def test_rational_witness_reconstructs(self, k, j, a):
        y = k + j * a / 2
        d = in_z_plus_half_a_z(RealParam.of(y), RealParam.of(a))
        assert d.result and d.exact
        kk, jj = d.witness
        assert kk + jj * a / 2 == y

    def test_quadratic_membership(self):
        g = RealParam.of({"kind": "quadratic", "cf_period": [1]})
        y = RealParam.of("3") + g * RealParam.of("3/2")  # 3 + 3 (g/2)
        d = in_z_plus_half_a_z(y, g)
        assert d.result and d.witness == (3, 3)
        assert in_z_plus_half_a_z(RealParam.of("1/3"), g).result is False

    def test_float_rational_mix(self):
        d = in_z_plus_half_a_z(RealParam.of(0.25), RealParam.of("1/2"))
        assert d.result and not d.exact

    def test_undecidable_floats(self):
        d = in_z_plus_half_a_z(RealParam.of(0.3), RealParam.of(math.sqrt(2)))
        assert d.result is None
