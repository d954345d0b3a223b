"""Decision procedures for global analytic hypoellipticity (GAH)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .diophantine import (DEFAULT_BS, adc_scan, classify_number, lacunary_violation_witnesses,
                          resonance_set)
from .errors import NeedsExactness
from .numbers import ComplexParam, RealParam, in_lattice, is_zero
from .operators import OperatorSpec
from .torus import classify_sign

WORKING_PRECISION = "at working precision"


@dataclass
class Verdict:
    answer: str  # GAH | NotGAH | Inconclusive
    certificate: dict
    cutoffs: dict = field(default_factory=dict)
    qualifier: str | None = None

    def to_json(self) -> dict:
        out = {"answer": self.answer, "certificate": self.certificate, "cutoffs": self.cutoffs}
        if self.qualifier:
            out["qualifier"] = self.qualifier
        return out

    @property
    def kind(self) -> str:
        return self.certificate["kind"]


@dataclass(frozen=True)
class ConditionResult:
    kind: str  # C1 | C2 | Neither
    witness: tuple | None
    exact: bool
    detail: dict = field(default_factory=dict)


def check_c1_c2(c0, q) -> ConditionResult:
    """Which of (C1), (C2) holds; ``Neither`` carries the resonant (k, twoM)."""
    c0, q = ComplexParam.of(c0), ComplexParam.of(q)
    bz = is_zero(c0.im)
    rs = resonance_set(c0, q)
    if rs.status == "Infinite":
        return ConditionResult("Neither", rs.witness, rs.exact, {"m": rs.witness[1] / 2})
    name = "C2" if bz.result else "C1"
    x, y, b, a = q.re, q.im, c0.im, c0.re
    detail = {}
    if name == "C1":
        half = in_lattice(x / b, Fraction(1, 2))
        detail["ReQ_over_b0_in_halfZ"] = bool(half.result)
        if half.result:
            detail["shifted_ImQ_in_Z"] = False
    else:
        detail["ReQ_nonzero"] = not is_zero(x).result
    return ConditionResult(name, None, rs.exact, detail)


def _qual(*exact_flags):
    return None if all(exact_flags) else WORKING_PRECISION


def _dist_to_lattice(x: float, step: float) -> float:
    r = x / step
    return abs(r - round(r)) * step


def gah_constant(c0, q, twoEllMax=64, Bs=DEFAULT_BS) -> Verdict:
    """Decide GAH for d_t + c0 d_0 + q with constant c0, q."""
    c0, q = ComplexParam.of(c0), ComplexParam.of(q)
    a, b, x, y = c0.re, c0.im, q.re, q.im
    cut = {"twoEllMax": twoEllMax}
    rs = resonance_set(c0, q)
    if rs.status == "Infinite":
        k, twoM = rs.witness
        cert = {"kind": "ResonantModes", "k": k, "twoM": twoM,
                "identity": "k + c0*m - i*q = 0", "exact": rs.exact}
        bz = is_zero(b)
        if bz.result and is_zero(x).result:
            # iq lies in Z + (a0/2)Z: the resonance already rules out GAH; the
            # arithmetic class of a0 is reported for information only
            cert["a0_class"] = classify_number(a).kind
        return Verdict("NotGAH", cert, cut, rs.qualifier)
    bz = is_zero(b)
    if not bz.result:
        bv, xv = b.value, x.value
        half = in_lattice(x / b, Fraction(1, 2))
        if not half.result:
            bound = abs(bv) * _dist_to_lattice(xv / bv, 0.5)
            return Verdict("GAH", {"kind": "ADCCertified", "branch": "b!=0, Re q/b not in Z/2",
                                   "lower_bound": bound,
                                   "reason": "|k + cm - iq| >= |bm - Re q| >= |b| dist(Re q/b, Z/2)"},
                           cut, _qual(bz.exact, half.exact, rs.exact))
        m0 = half.witness[0] / 2
        delta = _dist_to_lattice(m0 * a.value + y.value, 1.0)
        return Verdict("GAH", {"kind": "ADCCertified",
                               "branch": "b!=0, Re q/b in Z/2, Im q + Re q a/b not in Z",
                               "lower_bound": min(abs(bv) / 2, delta),
                               "reason": "|bm - Re q| >= |b|/2 for m != Re q/b, "
                                         "and |k + a m + Im q| >= delta at m = Re q/b"},
                       cut, _qual(bz.exact, half.exact, rs.exact))
    xz = is_zero(x)
    if not xz.result:
        return Verdict("GAH", {"kind": "ADCCertified", "branch": "b=0, Re q != 0",
                               "lower_bound": abs(x.value), "reason": "|k + cm - iq| >= |Re q|"},
                       cut, _qual(bz.exact, xz.exact, rs.exact))
    # b = 0, Re q = 0, and Im q not in Z + (a/2)Z
    return _decide_adc3(a, y, cut, twoEllMax, Bs, _qual(bz.exact, xz.exact, rs.exact))


def _decide_adc3(a: RealParam, y: RealParam, cut, twoEllMax, Bs, qual) -> Verdict:
    branch = "b=0, Re q=0, Im q not in Z + (a/2)Z"
    if a.is_rational:
        half = a.exact.r / 2
        d = half.denominator if half != 0 else 1
        bound = _dist_to_lattice(y.value, 1.0 / d)
        return Verdict("GAH", {"kind": "ADCCertified", "branch": branch,
                               "reason": "Z + (a/2)Z = (1/d)Z is discrete", "d": d,
                               "lower_bound": bound}, cut, qual)
    cls = classify_number(a)
    if a.exact is not None and a.exact.gen.kind == "sqrt" and y.exact is not None and (
            y.exact.gen is None or y.exact.gen == a.exact.gen):
        d = a.exact.gen.key[0]
        return Verdict("GAH", {"kind": "ADCCertified", "branch": branch,
                               "reason": f"k + (a/2) r + Im q is a nonzero element of Q(sqrt({d})); "
                                         "its field norm has bounded denominator, giving a "
                                         "polynomial lower bound",
                               "a0_class": cls.kind}, cut, qual)
    if cls.kind == "ExponentialLiouville" and a.exact.gen.kind == "lacunary":
        wit = lacunary_violation_witnesses(a, y)
        usable = [w for w in wit if isinstance(w["weight_exponent"], int) or math.isinf(w["log_value_upper"])]
        if len(usable) >= 2:
            rates = []
            for w in usable:
                if isinstance(w["weight_exponent"], int) and w["weight_exponent"] > 0:
                    rates.append(-w["log_value_upper"] / w["weight_exponent"])
            tail = rates[-1] if rates else None
            return Verdict("NotGAH", {"kind": "ADCViolation", "branch": branch,
                                      "witnesses": usable,
                                      "violated_for_B_below": tail,
                                      "a0_class": cls.to_json(),
                                      "assumes": "the declared tail rule of the lacunary series"},
                           cut, qual)
    rep = adc_scan(ComplexParam(a, RealParam.of(0)), ComplexParam(RealParam.of(0), y),
                   "ADC3", twoEllMax, Bs)
    return Verdict("Inconclusive", {"kind": "ScanOnly", "branch": branch,
                                    "scan": rep.to_json(), "a0_class": cls.to_json()},
                   {"twoEllMax": twoEllMax, "depth": cls.depth}, qual)


def gah_variable(spec: OperatorSpec, twoEllMax=64, Bs=DEFAULT_BS) -> Verdict:
    """Decide GAH for d_t + c(t) d_0 + q with c = a + ib trigonometric polynomials."""
    sc = classify_sign(spec.b)
    if sc.tag == "ChangesSign":
        tm, tp = sc.witnesses
        return Verdict("NotGAH", {"kind": "SignChange", "t_minus": tm, "t_plus": tp,
                                  "b_t_minus": float(spec.b(tm)), "b_t_plus": float(spec.b(tp)),
                                  "crossing": sc.crossing},
                       {"sign_certification": "derivative-bound subdivision"})
    if sc.tag == "IdenticallyZero":
        v = gah_constant(ComplexParam(spec.a0, RealParam.of(0)), spec.q, twoEllMax, Bs)
        v.certificate = dict(v.certificate, via="gauge map Psi_a conjugates P to P0")
        return v
    cond = check_c1_c2(spec.c0, spec.q)
    if cond.kind == "C1":
        return Verdict("GAH", {"kind": "C1Holds", "sign": sc.tag, "details": cond.detail,
                               "reason": "Im c does not change sign and (C1) holds; (ADC) for P0 "
                                         "follows"},
                       {}, None if cond.exact else WORKING_PRECISION)
    k, twoM = cond.witness
    return Verdict("NotGAH", {"kind": "ResonantModes", "k": k, "twoM": twoM,
                              "identity": "gamma_m = i m c0 + q lies in iZ"},
                   {}, None if cond.exact else WORKING_PRECISION)


def cross_check_relation(spec: OperatorSpec, twoEllMax=64, Bs=DEFAULT_BS) -> dict:
    """If P is GAH then P0 = d_t + c0 d_0 + q must be GAH."""
    vp = decide(spec, twoEllMax, Bs)
    try:
        v0 = gah_constant(spec.c0, spec.q, twoEllMax, Bs)
    except NeedsExactness as exc:
        v0 = _scan_only(spec.c0, spec.q, exc, twoEllMax, Bs)
    ok = not (vp.answer == "GAH" and v0.answer != "GAH")
    return {"P": vp.answer, "P0": v0.answer, "consistent": ok,
            "P_certificate": vp.kind, "P0_certificate": v0.kind}


def decide(spec: OperatorSpec, twoEllMax=64, Bs=DEFAULT_BS) -> Verdict:
    """gah_variable, with undecidable float data turned into an Inconclusive scan."""
    try:
        return gah_variable(spec, twoEllMax, Bs)
    except NeedsExactness as exc:
        return _scan_only(spec.c0, spec.q, exc, twoEllMax, Bs)


def _scan_only(c0, q, exc, twoEllMax, Bs) -> Verdict:
    rep = adc_scan(c0, q, "ADC3", twoEllMax, Bs)
    return Verdict("Inconclusive", {"kind": "ScanOnly", "reason": str(exc), "scan": rep.to_json()},
                   {"twoEllMax": twoEllMax, "Bs": list(Bs)}, WORKING_PRECISION)
