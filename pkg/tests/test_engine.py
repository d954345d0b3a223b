"""Verdicts of the decision procedures, checked against stored snapshots."""

import json
import os
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gahtorus import OperatorSpec, check_c1_c2, cross_check_relation, decide, gah_constant
from gahtorus.engine import gah_variable
from gahtorus.errors import NeedsExactness
from cases import EXAMPLES, GOLDEN_RATIO

GOLDEN_DIR = Path(__file__).parent / "golden"
UPDATE = os.environ.get("GAHTORUS_UPDATE_GOLDEN") == "1"


def snapshot(name, obj):
    path = GOLDEN_DIR / f"{name}.json"
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if UPDATE or not path.exists():
        path.write_text(text)
    return json.loads(path.read_text()) == json.loads(text)


class TestExamples:
    @pytest.mark.parametrize("name", sorted(EXAMPLES))
    def test_answer(self, name):
        op, answer, kind = EXAMPLES[name]
        v = decide(OperatorSpec.make(**op))
        assert (v.answer, v.kind) == (answer, kind)

    @pytest.mark.parametrize("name", sorted(EXAMPLES))
    def test_snapshot(self, name):
        v = decide(OperatorSpec.make(**EXAMPLES[name][0]))
        assert snapshot(f"verdict_{name}", v.to_json())


class TestConstant:
    def test_b_nonzero_lower_bound(self):
        v = gah_constant([0, 1], "3/10")
        assert v.answer == "GAH" and abs(v.certificate["lower_bound"] - 0.2) < 1e-15

    def test_shifted_branch(self):
        v = gah_constant([0, 1], ["1/2", "1/3"])
        assert v.certificate["branch"].startswith("b!=0, Re q/b in Z/2")
        assert abs(v.certificate["lower_bound"] - 1 / 3) < 1e-15

    def test_rational_a_discrete_lattice(self):
        v = gah_constant("1/3", [0, "1/7"])
        assert v.certificate["d"] == 6

    def test_quadratic_a(self):
        v = gah_constant(GOLDEN_RATIO, [0, "1/3"])
        assert v.answer == "GAH" and v.certificate["a0_class"] == "AlgebraicNonLiouville"

    def test_float_inputs_qualified(self):
        v = gah_constant([0, 1], 0.3)
        assert v.answer == "GAH" and v.qualifier == "at working precision"

    def test_float_irrational_a_is_inconclusive(self):
        v = decide(OperatorSpec.make(a=1.4142135623730951, b=0, q=[0, 0.3]))
        assert v.answer == "Inconclusive" and v.kind == "ScanOnly"

    def test_float_near_resonance(self):
        with pytest.raises(NeedsExactness):
            gah_constant([0, 1], 0.5 + 1e-14)
        assert decide(OperatorSpec.make(a=0, b=1, q=0.5 + 1e-14)).answer == "Inconclusive"


class TestConditions:
    def test_c1(self):
        r = check_c1_c2([0, 2], "3/10")
        assert r.kind == "C1" and r.exact

    def test_c2(self):
        assert check_c1_c2("1/3", [0, "1/7"]).kind == "C2"

    def test_neither(self):
        r = check_c1_c2([0, 1], "1/2")
        assert r.kind == "Neither" and r.witness == (0, 1)

    def test_nonnegative_b_with_zero(self):
        spec = OperatorSpec.make(a=0, b={"mean": 1, "cos": [-1]}, q="1/5")
        v = gah_variable(spec)
        assert v.answer == "GAH" and v.certificate["sign"] == "NonNegative"


rationals = st.fractions(min_value=-2, max_value=2, max_denominator=6).map(str)
harmonics = st.lists(st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0]), max_size=2)


class TestRelation:
    @given(rationals, harmonics, rationals, harmonics, rationals, rationals)
    @settings(max_examples=80, deadline=None)
    def test_gah_of_p_implies_gah_of_p0(self, a0, ac, b0, bs, x, y):
        spec = OperatorSpec.make(a={"mean": a0, "cos": ac}, b={"mean": b0, "sin": bs}, q=[x, y])
        assert cross_check_relation(spec)["consistent"]
