"""Resonances and analytic Diophantine conditions for ``d_t + c d_0 + q``.

Write c = a + ib and q = x + iy.  Then

    k + c m - i q = (k + a m + y) + i (b m - x),      k in Z, m in Z/2,

and the four formulations scanned here are

    ADC   |k + c m - iq| e^{B(|k| + |m| + 1)}         (ell = |m| is optimal)
    ADC2  |k + c rho - iq| e^{B(|k| + |rho|)}         rho in Z/2
    ADC3  |k + (c/2) r - iq| e^{B(|k| + |r|)}         r in Z
    ADC4  |1 - e^{+-2pi(imc + q)}| e^{B ell}          ell = |m|

Small values are refined in 256-bit interval arithmetic from the exact forms
of the parameters whenever those exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import iv

from .errors import InconsistencyDetected, NeedsExactness
from .numbers import (ComplexParam, Decision, RealParam, convergents, in_lattice,
                      in_z_plus_half_a_z, is_zero)

FORMULATIONS = ("ADC", "ADC2", "ADC3", "ADC4")
DEFAULT_BS = (0.1, 0.5, 1.0, 2.0)
VIOLATION_THRESHOLD = 1e-12
REFINE_BELOW = 1e-6
PREC = 256


def gamma(twoM: int, c0, q) -> complex:
    """gamma_m = i m c0 + q."""
    c0, q = ComplexParam.of(c0), ComplexParam.of(q)
    return 1j * (twoM / 2) * c0.value + q.value


def gamma_parts(twoM: int, c0: ComplexParam, q: ComplexParam):
    """Exact-when-possible (Re, Im) of gamma_m = (Re q - m b) + i (m a + Im q)."""
    m = RealParam.of(Fraction(twoM, 2))
    return q.re - m * c0.im, m * c0.re + q.im


# --------------------------------------------------------------------------
# resonance set


@dataclass(frozen=True)
class ResonanceSet:
    status: str  # "Empty" | "Infinite"
    witness: tuple | None = None  # (k, twoM) with k + c m - i q = 0
    exact: bool = True

    @property
    def qualifier(self):
        return None if self.exact else "at working precision"

    def to_json(self):
        out = {"status": self.status, "witness": list(self.witness) if self.witness else None}
        if not self.exact:
            out["qualifier"] = self.qualifier
        return out


def _decided(d: Decision, what: str) -> Decision:
    if d.result is None:
        raise NeedsExactness(f"cannot decide {what} from the given number classes")
    if d.result and not d.exact:
        raise NeedsExactness(f"float inputs lie within 1e-12 of {what}; supply exact annotations")
    return d


def resonance_set(c, q) -> ResonanceSet:
    """Decide whether k + c m - i q = 0 has a solution (k, m) in Z x Z/2."""
    c, q = ComplexParam.of(c), ComplexParam.of(q)
    a, b, x, y = c.re, c.im, q.re, q.im
    bz = is_zero(b)
    if bz.result and not bz.exact and b.value != 0.0:
        raise NeedsExactness("b is within 1e-12 of zero but not exactly zero")
    exact = bz.exact
    if not bz.result:
        d = _decided(in_lattice(x / b, Fraction(1, 2)), "m = Re q / b in Z/2")
        exact = exact and d.exact
        if not d.result:
            return ResonanceSet("Empty", None, exact)
        twoM = d.witness[0]
        kk = -(RealParam.of(Fraction(twoM, 2)) * a + y)
        dk = _decided(in_lattice(kk), "k = -(a m + Im q) in Z")
        exact = exact and dk.exact
        if not dk.result:
            return ResonanceSet("Empty", None, exact)
        return ResonanceSet("Infinite", (dk.witness[0], twoM), exact)
    xz = is_zero(x)
    if xz.result and not xz.exact and x.value != 0.0:
        raise NeedsExactness("Re q is within 1e-12 of zero but not exactly zero")
    exact = exact and xz.exact
    if not xz.result:
        return ResonanceSet("Empty", None, exact)
    d = _decided(in_z_plus_half_a_z(-y, a), "Im q in Z + (a/2)Z")
    exact = exact and d.exact
    if not d.result:
        return ResonanceSet("Empty", None, exact)
    k, j = d.witness
    return ResonanceSet("Infinite", (k, j), exact)


# --------------------------------------------------------------------------
# scanning


@dataclass
class AdcScanReport:
    formulation: str
    cutoffs: dict
    minima: dict  # B -> {"value", "k", "twoM"}
    worst_witness: tuple | None
    verdict: str  # NoViolationUpToCutoff | ViolationWitness | ExactResonanceFound
    min_abs: dict = field(default_factory=dict)
    exact_resonances: list = field(default_factory=list)
    qualifier: str | None = None

    def to_json(self):
        return {
            "formulation": self.formulation,
            "cutoffs": self.cutoffs,
            "minima": {str(B): v for B, v in self.minima.items()},
            "worstWitness": list(self.worst_witness) if self.worst_witness else None,
            "verdict": self.verdict,
            "minAbs": self.min_abs,
            "exactResonances": [list(r) for r in self.exact_resonances[:20]],
            "qualifier": self.qualifier,
        }


def _iv(x: RealParam):
    return x.interval(PREC)


def _exact_zero(expr: RealParam):
    """True/False if decidable exactly, None otherwise."""
    if expr.exact is None:
        return None
    return expr.exact.is_zero()


class _Refiner:
    """Interval evaluation of the scanned quantities for one (c, q)."""

    def __init__(self, c: ComplexParam, q: ComplexParam):
        self.c, self.q = c, q
        self.exact = c.is_exact and q.is_exact
        iv.prec = PREC
        self.a, self.b = _iv(c.re), _iv(c.im)
        self.x, self.y = _iv(q.re), _iv(q.im)

    def parts(self, k: int, twoM: int):
        """Re and Im of k + c m - iq as (exact RealParam, interval)."""
        m = RealParam.of(Fraction(twoM, 2))
        re_p = RealParam.of(k) + m * self.c.re + self.q.im
        im_p = m * self.c.im - self.q.re
        iv.prec = PREC
        mi = iv.mpf(twoM) / 2
        re_i = k + mi * self.a + self.y
        im_i = mi * self.b - self.x
        return re_p, im_p, re_i, im_i

    def is_resonance(self, k, twoM):
        re_p, im_p, re_i, im_i = self.parts(k, twoM)
        zr, zi = _exact_zero(re_p), _exact_zero(im_p)
        if zr is not None and zi is not None:
            return zr and zi, True
        contains = (0 in re_i) and (0 in im_i)
        return contains, False

    def abs_value(self, k, twoM):
        """Interval of |k + c m - iq|."""
        _, _, re_i, im_i = self.parts(k, twoM)
        return iv.sqrt(re_i ** 2 + im_i ** 2)

    def adc4_value(self, k, twoM, sign):
        """Interval of |1 - e^{sign 2pi (i m c + q)}| using the reduced angle k + m a + Im q."""
        _, _, re_i, im_i = self.parts(k, twoM)
        iv.prec = PREC
        u = -2 * iv.pi * sign * im_i  # 2pi*sign*(x - m b)
        eu = iv.exp(u)
        s = iv.sin(iv.pi * re_i)
        return iv.sqrt((eu - 1) ** 2 + 4 * eu * s ** 2)


def _float_parts(c: ComplexParam, q: ComplexParam, twoM: np.ndarray, k: np.ndarray):
    a, b = c.re.value, c.im.value
    x, y = q.re.value, q.im.value
    m = twoM / 2.0
    return k + a * m + y, b * m - x


def _candidate_ks(c, q, twoM):
    a, y = c.re.value, q.im.value
    k0 = -np.rint(a * (twoM / 2.0) + y)
    ks = [k0 + d for d in (-2, -1, 0, 1, 2)]
    ks += [np.full_like(k0, v) for v in (-1.0, 0.0, 1.0)]
    K = np.stack(ks, axis=1)
    return K


def adc_scan(c, q, formulation="ADC", twoEllMax=64, Bs=DEFAULT_BS,
             violation_threshold=VIOLATION_THRESHOLD) -> AdcScanReport:
    """Exhaustive scan of one formulation up to the cutoff ``|m| <= twoEllMax/2``.

    For ADC3 the integer r plays the role of twoM, so r ranges over
    |r| <= twoEllMax as well.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    Bs = tuple(float(B) for B in Bs)
    if not Bs or any(B <= 0 for B in Bs):
        raise ValueError("Bs must be a nonempty list of positive numbers")
    c, q = ComplexParam.of(c), ComplexParam.of(q)
    ref = _Refiner(c, q)
    twoM = np.arange(-twoEllMax, twoEllMax + 1, dtype=float)
    # for ADC3, |k + (c/2) r - iq| with r integer is |k + c m - iq| at twoM = r
    K = _candidate_ks(c, q, twoM)
    TM = np.broadcast_to(twoM[:, None], K.shape)
    re, im = _float_parts(c, q, TM, K)
    if formulation == "ADC4":
        vals = []
        for sign in (1.0, -1.0):
            u = 2 * np.pi * sign * (-im)
            with np.errstate(over="ignore", invalid="ignore"):
                v = np.sqrt(np.expm1(u) ** 2 + 4 * np.exp(u) * np.sin(np.pi * re) ** 2)
            # overflow gives inf * 0 = nan where sin vanishes; the value is +inf there
            v[np.isnan(v)] = np.inf
            vals.append(v)
        base = np.stack(vals, axis=2)  # [m, k, sign]
    else:
        base = np.hypot(re, im)[:, :, None]
    absm = np.abs(TM) / 2.0
    absk = np.abs(K)
    if formulation == "ADC":
        expo = absk + absm + 1.0
    elif formulation == "ADC2":
        expo = absk + absm
    elif formulation == "ADC3":
        expo = absk + np.abs(TM)
    else:
        expo = absm
    resonances, seen = [], set()
    qualifier = None if ref.exact else "at working precision"
    refined = {}
    flat_small = np.argwhere(base < REFINE_BELOW)
    for i, j, s in flat_small:
        key = (int(K[i, j]), int(TM[i, j]))
        if key not in refined:
            is_res, certain = ref.is_resonance(*key)
            refined[key] = (is_res, certain)
        is_res, certain = refined[key]
        if is_res:
            if key not in seen:
                seen.add(key)
                resonances.append(key)
            base[i, j, s] = np.inf
            continue
        if formulation == "ADC4":
            val = ref.adc4_value(key[0], key[1], 1 if s == 0 else -1)
        else:
            val = ref.abs_value(*key)
        hi = float(val.b)
        mid = float(val.mid)
        base[i, j, s] = mid if mid > 0 else hi
    minima = {}
    worst = None
    for B in Bs:
        with np.errstate(over="ignore"):
            w = base * np.exp(B * expo)[:, :, None]
        idx = np.unravel_index(np.argmin(w), w.shape)
        i, j, s = idx
        val = float(w[idx])
        entry = {"value": val, "k": int(K[i, j]), "twoM": int(TM[i, j])}
        if formulation == "ADC4":
            # the exponential form does not see k; report the nearest lattice k
            entry["k"] = int(-round(c.re.value * entry["twoM"] / 2 + q.im.value))
            entry["sign"] = 1 if s == 0 else -1
        minima[B] = entry
        if worst is None or val < worst[2]:
            worst = (entry["k"], entry["twoM"], val)
    idx = np.unravel_index(np.argmin(base), base.shape)
    min_abs = {"value": float(base[idx]), "k": int(K[idx[0], idx[1]]), "twoM": int(TM[idx[0], idx[1]])}
    if resonances:
        verdict = "ExactResonanceFound"
    elif worst is not None and worst[2] <= violation_threshold:
        verdict = "ViolationWitness"
    else:
        verdict = "NoViolationUpToCutoff"
    if resonances and not all(refined[r][1] for r in resonances):
        qualifier = "at working precision"
    kmax = int(np.max(np.abs(K)))
    return AdcScanReport(formulation, {"twoEllMax": twoEllMax, "kMax": kmax}, minima, worst,
                         verdict, min_abs, resonances, qualifier)


# constants from the mean value theorem bounds relating ADC and ADC4
EQUIVALENCE_CONSTANTS = {"two": 2.0, "exp_inv_two_pi": 2 * math.pi / math.e, "pi": math.pi}


def adc_equivalence_check(c, q, twoEllMax=64, Bs=DEFAULT_BS, raise_on_failure=True) -> dict:
    """Run all four scans and cross-check verdicts and witnesses."""
    c, q = ComplexParam.of(c), ComplexParam.of(q)
    reports = {f: adc_scan(c, q, f, twoEllMax, Bs) for f in FORMULATIONS}
    verdicts = {f: r.verdict for f, r in reports.items()}
    problems = []
    if len(set(verdicts.values())) != 1:
        problems.append(f"verdicts differ: {verdicts}")
    # ADC, ADC2 and ADC3 are the same lattice points; their unweighted minima coincide
    m1 = reports["ADC"].min_abs
    for f in ("ADC2", "ADC3"):
        mf = reports[f].min_abs
        if not _close(m1["value"], mf["value"]):
            problems.append(f"{f} unweighted minimum {mf['value']} != ADC {m1['value']}")
    # Near a lattice point, ADC4 and ADC are comparable through the mean value
    # theorem:  |Re q - m b| <= (e/2pi)|1 - e^{..}|  and  |k + m a + Im q| <= (2/pi)|1 - e^{..}|,
    # so |1 - e^{..}| / |k + cm - iq| >= 1/(e/2pi + 2/pi); the upper comparison
    # constant is 2pi e for the small arguments reached by violation witnesses.
    if verdicts["ADC"] == "ViolationWitness":
        ref = _Refiner(c, q)
        lo = 1.0 / (1.0 / EQUIVALENCE_CONSTANTS["exp_inv_two_pi"] + EQUIVALENCE_CONSTANTS["two"] / EQUIVALENCE_CONSTANTS["pi"])
        hi = 2 * math.pi * math.e
        Bmin = min(Bs)
        for name, w in (("ADC", reports["ADC"].worst_witness), ("ADC4", reports["ADC4"].worst_witness)):
            k, twoM = w[0], w[1]
            base = float(ref.abs_value(k, twoM).mid)
            v4 = min(float(ref.adc4_value(k, twoM, s).mid) for s in (1, -1))
            ratio = v4 / base if base > 0 else math.nan
            if not (lo <= ratio <= hi):
                problems.append(f"{name} witness ADC4/ADC ratio {ratio:.4g} outside [{lo:.4g}, {hi:.4g}]")
            weighted = base * math.exp(Bmin * (abs(k) + abs(twoM) / 2 + 1))
            if weighted > violation_slack(Bs):
                problems.append(f"{name} witness (k={k}, twoM={twoM}) is not an ADC near-violation")
    if verdicts["ADC"] == "ExactResonanceFound":
        r0 = set(reports["ADC"].exact_resonances)
        for f in ("ADC2", "ADC3", "ADC4"):
            if not r0 & set(reports[f].exact_resonances):
                problems.append(f"{f} resonances do not match ADC")
    report = {"verdicts": verdicts, "consistent": not problems, "problems": problems,
              "constants": EQUIVALENCE_CONSTANTS,
              "reports": {f: r.to_json() for f, r in reports.items()}}
    if problems and raise_on_failure:
        raise InconsistencyDetected("; ".join(problems))
    return report


def violation_slack(Bs):
    """Threshold for cross-formulation witnesses: the largest weight ratio between formulations."""
    return VIOLATION_THRESHOLD * math.exp(max(Bs))


def _close(x, y, rel=1e-9):
    if math.isinf(x) and math.isinf(y):
        return True
    return abs(x - y) <= rel * max(abs(x), abs(y), 1e-300)


# --------------------------------------------------------------------------
# number classification


@dataclass(frozen=True)
class NumberClass:
    kind: str  # Rational | AlgebraicNonLiouville | ExponentialLiouville | UnknownUpToDepth
    certificate: dict
    depth: int

    def to_json(self):
        return {"kind": self.kind, "certificate": self.certificate, "depth": self.depth}


DEFAULT_EPS0 = 1e-3
DEFAULT_DEPTH = 30
OPERATIONAL_NOTE = ("operational criterion: a finite prefix can only exhibit a subsequence of "
                    "exponentially good convergents, not prove its infinitude")


def _frac_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _big_log(n: int) -> float:
    return math.log(n) if n > 0 else -math.inf


def _int_repr(n: int):
    return n if n.bit_length() <= 64 else f"<{n.bit_length()}-bit integer>"


def classify_number(x, eps0=DEFAULT_EPS0, depth=DEFAULT_DEPTH) -> NumberClass:
    p = RealParam.of(x)
    if p.is_rational:
        r = p.exact.r
        return NumberClass("Rational", {"p": r.numerator, "q": r.denominator}, 0)
    if p.kind == "quadratic" or (p.exact is not None and p.exact.gen.kind == "sqrt"):
        d = p.exact.gen.key[0]
        return NumberClass("AlgebraicNonLiouville",
                           {"reason": "quadratic irrational: periodic continued fraction, bounded "
                                      "partial quotients give |x - p/q| >= C/q^2",
                            "field": f"Q(sqrt({d}))", "value": str(p.exact)}, 0)
    if p.exact is not None and p.exact.gen.kind == "cf":
        return _classify_cf(p, eps0, depth)
    if p.exact is not None and p.exact.gen.kind == "lacunary":
        return _classify_lacunary(p, eps0)
    return NumberClass("UnknownUpToDepth", {"reason": "float input carries no arithmetic data"}, 0)


def _classify_cf(p: RealParam, eps0, depth) -> NumberClass:
    gen = p.exact.gen
    # affine images r + s*xi (r, s rational) share the Liouville property of xi
    qs = gen.key[: depth + 1]
    convs = list(convergents(qs))
    rows, qualifying = [], []
    for n in range(len(convs) - 1):
        pn, qn = convs[n]
        qn1 = convs[n + 1][1]
        # |xi - p_n/q_n| <= 1/(q_n q_{n+1})
        r_n = _big_log(qn * qn1) / qn
        good = r_n >= eps0 and qn >= 2 and qn1 >= qn ** 3
        rows.append({"n": n, "p": _int_repr(pn), "q": _int_repr(qn), "rate_lower_bound": r_n})
        if good:
            qualifying.append(n)
    last = len(convs) - 2
    if len(qualifying) >= 2 and qualifying[-1] >= (2 * last) // 3:
        eps = min(rows[n]["rate_lower_bound"] for n in qualifying)
        return NumberClass("ExponentialLiouville",
                           {"epsilon": eps, "indices": qualifying, "convergents": rows,
                            "note": OPERATIONAL_NOTE}, len(qs))
    return NumberClass("UnknownUpToDepth", {"convergents": rows[-5:], "note": OPERATIONAL_NOTE},
                       len(qs))


def lacunary_convergents(key):
    """Partial sums s_n with rigorous tail bounds: list of (s_n, q_n, minus_log_err_lower)."""
    base, exps, nxt = key
    out = []
    s = Fraction(0)
    lb = math.log(base)
    tail_const = math.log(base / (base - 1))
    for i, k in enumerate(exps):
        s += Fraction(1, base ** k)
        k_next = exps[i + 1] if i + 1 < len(exps) else nxt
        # lambda - s_n = sum over later exponents <= base^{-k_next} * base/(base-1)
        mlog = k_next * lb - tail_const if k_next.bit_length() < 1000 else math.inf
        out.append((s, s.denominator, k_next, mlog))
    return out


def _classify_lacunary(p: RealParam, eps0) -> NumberClass:
    base, exps, nxt = p.exact.gen.key
    lb = math.log(base)
    tail_const = math.log(base / (base - 1))
    rows, qualifying = [], []
    for n, (s, qn, k_next, _) in enumerate(lacunary_convergents(p.exact.gen.key)):
        # rate = -ln|err| / q_n >= (k_next ln(base) - ln(base/(base-1))) / q_n
        rate = _frac_float(Fraction(k_next, qn)) * lb - tail_const * _frac_float(Fraction(1, qn))
        rows.append({"n": n + 1, "p": _int_repr(s.numerator), "q": _int_repr(qn),
                     "log2_q": qn.bit_length() - 1, "next_exponent": _int_repr(k_next),
                     "rate_lower_bound": rate})
        if rate >= eps0:
            qualifying.append(n)
    if len(qualifying) >= 2 and qualifying[-1] == len(rows) - 1:
        eps = min(rows[n]["rate_lower_bound"] for n in qualifying)
        return NumberClass("ExponentialLiouville",
                           {"epsilon": eps, "indices": [n + 1 for n in qualifying],
                            "convergents": rows, "tail_rule": "declared next exponent",
                            "note": OPERATIONAL_NOTE}, len(rows))
    return NumberClass("UnknownUpToDepth", {"convergents": rows, "note": OPERATIONAL_NOTE},
                       len(rows))


def lacunary_violation_witnesses(a: RealParam, y: RealParam):
    """Near-resonances of |k + (a/2) r + y| built from the partial sums of a lacunary a.

    Requires y rational with denominator dividing 2*q_n.  Returns a list of
    dicts with k, r (= twoM) and a rigorous upper bound on the value.
    """
    if a.exact is None or a.exact.gen is None or a.exact.gen.kind != "lacunary":
        return []
    if y.exact is None or not y.exact.is_rational:
        return []
    ar, as_ = a.exact.r, a.exact.s
    yr = y.exact.r
    out = []
    for s, qn, k_next, mlog in lacunary_convergents(a.exact.gen.key):
        # a ~ ar + as*s exactly up to as*err, err <= e^{-mlog}
        approx = ar + as_ * s
        mod = 2 * approx.denominator
        P = approx.numerator
        # want r*P/(2Q) + y = integer  <=>  r*P = -y*2Q  (mod 2Q)
        t = -yr * mod
        if t.denominator != 1:
            continue
        try:
            inv = pow(P % mod, -1, mod)
        except ValueError:
            continue
        r = (int(t) * inv) % mod
        if r == 0:
            r = mod
        val = Fraction(r, 2) * approx + yr
        k = -val
        if k.denominator != 1:
            continue
        # |k + (a/2) r + y| = (r/2)|as| err
        bound_log = (math.log(r) - math.log(2) + math.log(abs(as_.numerator))
                     - math.log(as_.denominator) - mlog)
        out.append({"k": _int_repr(int(k)), "twoM": _int_repr(int(r)),
                    "log_value_upper": bound_log,
                    "weight_exponent": _int_repr(abs(int(k)) + r)})
    return out

