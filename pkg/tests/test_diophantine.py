"""Resonance sets, small-divisor scans and number classification."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gahtorus.diophantine import (FORMULATIONS, adc_equivalence_check, adc_scan, classify_number,
                                  gamma, lacunary_convergents, lacunary_violation_witnesses,
                                  resonance_set)
from gahtorus.errors import NeedsExactness
from gahtorus.numbers import ComplexParam, RealParam
from oracles import lacunary_sum

GOLDEN = {"kind": "quadratic", "cf_period": [1]}
TOWER = {"kind": "lacunary", "base": 2, "exponents": [2, 4, 16], "next_exponent": 65536}


class TestResonanceSet:
    @pytest.mark.parametrize("c, q, status", [
        ([0, 1], "1/2", "Infinite"),
        ([0, 1], "3/10", "Empty"),
        ([0, 1], ["1/2", "1/3"], "Empty"),
        (0, [0, -1], "Infinite"),
        (0, [0, "1/2"], "Empty"),
        (GOLDEN, 0, "Infinite"),
        ("1/3", [0, "1/7"], "Empty"),
        (0, "1/2", "Empty"),
    ])
    def test_status(self, c, q, status):
        assert resonance_set(c, q).status == status

    @given(st.integers(-6, 6), st.integers(-8, 8),
           st.fractions(min_value=-3, max_value=3, max_denominator=9),
           st.fractions(min_value=Fraction(1, 9), max_value=3, max_denominator=9))
    @settings(max_examples=100)
    def test_witness_solves_equation(self, k, twoM, a, b):
        # choose q so that (k, m) is a resonance, then check the reported witness
        m = Fraction(twoM, 2)
        q_re, q_im = m * b, -(k + m * a)
        r = resonance_set([str(a), str(b)], [str(q_re), str(q_im)])
        assert r.status == "Infinite" and r.exact
        kk, tm = r.witness
        assert abs(gamma(tm, complex(a, b), complex(q_re, q_im)) + 1j * kk) < 1e-12

    def test_float_near_lattice_needs_exactness(self):
        with pytest.raises(NeedsExactness):
            resonance_set([0, 1], 0.5 + 1e-14)

    def test_float_far_from_lattice_is_qualified(self):
        r = resonance_set([0, 1], 0.3)
        assert r.status == "Empty" and not r.exact
        assert r.to_json()["qualifier"] == "at working precision"


class TestScan:
    @pytest.mark.parametrize("f", FORMULATIONS)
    def test_non_resonant_constant(self, f):
        r = adc_scan([0, 1], "3/10", f, 32)
        assert r.verdict == "NoViolationUpToCutoff"

    def test_unweighted_minima_coincide(self):
        mins = [adc_scan([0, 1], "3/10", f, 32).min_abs for f in ("ADC", "ADC2", "ADC3")]
        assert all(abs(m["value"] - 0.2) < 1e-14 for m in mins)

    def test_resonance_found(self):
        r = adc_scan([0, 1], "1/2", "ADC", 16)
        assert r.verdict == "ExactResonanceFound" and (0, 1) in r.exact_resonances

    def test_brute_force_minimum(self):
        c, q = complex(0.3, 0.7), complex(0.2, 0.45)
        r = adc_scan(["3/10", "7/10"], ["1/5", "9/20"], "ADC", 12, Bs=(0.5,))
        best = min(abs(k + c * tm / 2 - 1j * q) * math.exp(0.5 * (abs(k) + abs(tm) / 2 + 1))
                   for k in range(-40, 41) for tm in range(-12, 13))
        assert abs(r.minima[0.5]["value"] - best) < 1e-12 * best

    def test_threshold_triggers_witness(self):
        r = adc_scan(TOWER, [0, "1/2"], "ADC3", 64, violation_threshold=1e-2)
        assert r.verdict == "ViolationWitness"
        assert abs(r.worst_witness[1]) == 16

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            adc_scan(0, 1, "ADC9")
        with pytest.raises(ValueError):
            adc_scan(0, 1, "ADC", Bs=(0.0,))

    @pytest.mark.parametrize("c, q", [([0, 1], "3/10"), ([0, 1], "1/2"), (TOWER, [0, "1/2"]),
                                      ("1/3", [0, "1/7"])])
    def test_equivalence(self, c, q):
        rep = adc_equivalence_check(c, q, 32)
        assert rep["consistent"] and len(set(rep["verdicts"].values())) == 1


class TestClassify:
    def test_rational(self):
        assert classify_number("3/7").to_json() == {"kind": "Rational",
                                                    "certificate": {"p": 3, "q": 7}, "depth": 0}

    def test_golden(self):
        assert classify_number(GOLDEN).kind == "AlgebraicNonLiouville"

    def test_tower(self):
        nc = classify_number(TOWER)
        assert nc.kind == "ExponentialLiouville"
        assert nc.certificate["epsilon"] >= math.log(2) / 2

    def test_short_tower_is_unknown(self):
        # exponents growing linearly give rates ~ n 2^-n, below eps0 at the end
        assert classify_number({"kind": "lacunary", "base": 2, "exponents": list(range(1, 15)),
                                "next_exponent": 15}).kind == "UnknownUpToDepth"

    def test_unknown_lacunary_field(self):
        with pytest.raises(ValueError):
            classify_number({"kind": "lacunary", "exponents": [1, 2], "next": 3})

    def test_floats_unknown(self):
        assert classify_number(math.pi).kind == "UnknownUpToDepth"

    def test_partial_sums(self):
        rows = lacunary_convergents((2, (2, 4, 16), 65536))
        for n, (s, qn, _, _) in enumerate(rows):
            assert s == lacunary_sum([2, 4, 16][:n + 1]) and qn == s.denominator

    def test_violation_witnesses_are_near_resonances(self):
        a = RealParam.of(TOWER)
        ws = lacunary_violation_witnesses(a, RealParam.of("1/2"))
        assert len(ws) >= 2
        for w in ws[:2]:
            val = abs(w["k"] + a.value * w["twoM"] / 2 + 0.5)
            assert val <= math.exp(w["log_value_upper"]) * (1 + 1e-9)
        logs = [w["log_value_upper"] for w in ws]
        assert logs == sorted(logs, reverse=True)

    def test_no_witnesses_for_irrational_shift(self):
        assert lacunary_violation_witnesses(RealParam.of(TOWER), RealParam.of(GOLDEN)) == []
