"""Real trigonometric polynomials on the circle T = R / 2piZ.

``TrigPoly(mean, cos, sin)`` stands for

    p(t) = mean + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t).

The sign classification is certified: every subinterval of a subdivision of
[0, 2pi] is closed by a bound on |p|, |p'| or |p''| derived from the
coefficients, so a returned verdict does not depend on grid luck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import CertificationFailure
from .numbers import RealParam

TWO_PI = 2.0 * math.pi


def _coef(x) -> float:
    """Harmonic coefficients are floats; rational strings such as "1/2" are accepted."""
    return float(Fraction(x)) if isinstance(x, str) else float(x)


@dataclass(frozen=True)
class TrigPoly:
    mean: float
    cos: tuple = ()
    sin: tuple = ()
    mean_param: RealParam | None = None

    def __post_init__(self):
        n = max(len(self.cos), len(self.sin))
        c = tuple(_coef(x) for x in self.cos) + (0.0,) * (n - len(self.cos))
        s = tuple(_coef(x) for x in self.sin) + (0.0,) * (n - len(self.sin))
        object.__setattr__(self, "cos", c)
        object.__setattr__(self, "sin", s)
        if self.mean_param is None:
            object.__setattr__(self, "mean_param", RealParam.of(self.mean))
        object.__setattr__(self, "mean", float(self.mean_param.value))

    # construction --------------------------------------------------------
    @classmethod
    def constant(cls, value) -> TrigPoly:
        p = RealParam.of(value)
        return cls(p.value, (), (), p)

    @classmethod
    def from_json(cls, obj) -> TrigPoly:
        if isinstance(obj, (int, float, str)) or (isinstance(obj, dict) and "kind" in obj):
            return cls.constant(obj)
        mean = obj.get("mean", 0)
        mp = RealParam.of(mean if not isinstance(mean, float) else float(mean))
        return cls(mp.value, tuple(obj.get("cos", ())), tuple(obj.get("sin", ())), mp)

    def to_json(self) -> dict:
        mean = self.mean_param.to_spec() if self.mean_param.is_exact else self.mean
        return {"mean": mean, "cos": list(self.cos), "sin": list(self.sin)}

    # basic structure -----------------------------------------------------
    @property
    def degree(self) -> int:
        for k in range(len(self.cos), 0, -1):
            if self.cos[k - 1] != 0.0 or self.sin[k - 1] != 0.0:
                return k
        return 0

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.mean)
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            if c:
                out = out + c * np.cos(k * t)
            if s:
                out = out + s * np.sin(k * t)
        return out if out.ndim else float(out)

    def derivative(self, order=1) -> TrigPoly:
        c, s = np.array(self.cos), np.array(self.sin)
        k = np.arange(1, len(c) + 1, dtype=float)
        for _ in range(order):
            c, s = k * s, -k * c
        return TrigPoly(0.0, tuple(c), tuple(s))

    def antiderivative(self) -> Antiderivative:
        """``t -> int_0^t p``, split into a linear part and a periodic part."""
        k = np.arange(1, self.degree + 1, dtype=float)
        c = np.array(self.cos[: self.degree])
        s = np.array(self.sin[: self.degree])
        per = TrigPoly(float(np.sum(s / k)) if len(k) else 0.0, tuple(-s / k), tuple(c / k))
        return Antiderivative(per, self.mean)

    def average(self) -> float:
        return self.mean

    def oscillation(self) -> float:
        """Crude upper bound for max p - min p."""
        return 2.0 * float(np.sum(np.abs(self.cos)) + np.sum(np.abs(self.sin)))

    def coefficient_norm(self, power=0) -> float:
        k = np.arange(1, len(self.cos) + 1, dtype=float)
        return float(np.sum(k ** power * (np.abs(self.cos) + np.abs(self.sin))))

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        n = max(len(self.cos), len(other.cos))
        pad = lambda v: np.array(v + (0.0,) * (n - len(v)))
        return TrigPoly(0.0, tuple(pad(self.cos) + pad(other.cos)),
                        tuple(pad(self.sin) + pad(other.sin)),
                        self.mean_param + other.mean_param)

    def scale(self, factor) -> TrigPoly:
        f = RealParam.of(factor)
        return TrigPoly(0.0, tuple(f.value * x for x in self.cos),
                        tuple(f.value * x for x in self.sin), self.mean_param * f)

    def __neg__(self):
        return self.scale(-1)

    def translate(self, t0) -> TrigPoly:
        """The polynomial t -> p(t + t0)."""
        cos, sin = [], []
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            ck, sk = math.cos(k * t0), math.sin(k * t0)
            cos.append(c * ck + s * sk)
            sin.append(s * ck - c * sk)
        return TrigPoly(0.0, tuple(cos), tuple(sin), self.mean_param)


@dataclass(frozen=True)
class Antiderivative:
    """``slope * t + base(t)`` with ``base`` periodic and value 0 at t = 0."""

    base: TrigPoly
    slope: float

    def __call__(self, t):
        return self.slope * np.asarray(t, dtype=float) + self.base(t)

    def derivative(self) -> TrigPoly:
        return self.base.derivative() + TrigPoly.constant(self.slope)


def evaluate(p: TrigPoly, t):
    return p(t)


def antiderivative(p: TrigPoly) -> Antiderivative:
    return p.antiderivative()


def average(p: TrigPoly) -> float:
    return p.mean


# --------------------------------------------------------------------------
# certified sign classification


class SignClass(NamedTuple):
    tag: str  # "IdenticallyZero" | "NonNegative" | "NonPositive" | "ChangesSign"
    witnesses: tuple = ()  # (t_minus, t_plus) with p(t_minus) < 0 < p(t_plus)
    crossing: float | None = None  # a point where p passes from - to +
    touches_zero: bool = False


def _canon(t: float) -> float:
    t = math.fmod(t, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def classify_sign(p: TrigPoly, max_depth=40, initial_cells=None) -> SignClass:
    """Certified classification of the sign of a real trigonometric polynomial.

    Cells of [0, 2pi] are split until each one is settled by one of

    * |p(mid)| > L1 * h/2, so p has a constant strict sign there,
    * |p'(mid)| > L2 * h/2, so p is monotone and the endpoint signs decide,
    * |p''(mid)| > L3 * h/2, so p is strictly convex/concave with a single
      extremum located by bisection of p'.

    Here Lj = sum k^j (|c_k| + |s_k|) bounds |p^(j)|.  A zero at which p
    keeps its sign is a tangency, not a sign change.
    """
    deg = p.degree
    big = max([abs(p.mean)] + [abs(x) for x in p.cos + p.sin])
    if deg > 0 and big != 1.0:
        # the sign pattern is scale invariant; normalising keeps eps meaningful
        p = TrigPoly(p.mean / big, tuple(x / big for x in p.cos), tuple(x / big for x in p.sin))
    if deg == 0:
        if p.mean == 0.0:
            return SignClass("IdenticallyZero", touches_zero=True)
        return SignClass("NonNegative" if p.mean > 0 else "NonPositive", (), None, False)
    dp, d2p = p.derivative(1), p.derivative(2)
    L = [p.coefficient_norm(j) for j in range(4)]
    scale = abs(p.mean) + L[0]
    eps = 64 * np.finfo(float).eps * max(scale, 1.0) * (deg + 1)
    cells = initial_cells or max(16, 8 * deg)
    stack = [(TWO_PI * i / cells, TWO_PI * (i + 1) / cells, 0) for i in range(cells)]
    saw_pos = saw_neg = touch = False
    while stack:
        a, b, depth = stack.pop()
        h2 = 0.5 * (b - a)
        m = a + h2
        pm = p(m)
        if abs(pm) > L[1] * h2 + eps:
            saw_pos |= pm > 0
            saw_neg |= pm < 0
            continue
        pa, pb = p(a), p(b)
        dpm = dp(m)
        if abs(dpm) > L[2] * h2 + eps:
            for v in (pa, pb):
                if abs(v) <= eps:
                    touch = True
                saw_pos |= v > eps
                saw_neg |= v < -eps
            continue
        if abs(d2p(m)) > L[3] * h2 + eps:
            # single critical point in [a, b] at most
            da, db = dp(a), dp(b)
            vals = [pa, pb]
            if da * db < 0:
                tc = brentq(dp, a, b, xtol=1e-15)
                vals.append(p(tc))
            for v in vals:
                if abs(v) <= eps:
                    touch = True
                saw_pos |= v > eps
                saw_neg |= v < -eps
            continue
        if depth >= max_depth:
            raise CertificationFailure(
                f"sign certification did not close near t={m:.6g} at depth {depth}")
        stack.append((a, m, depth + 1))
        stack.append((m, b, depth + 1))
    if saw_pos and saw_neg:
        t0 = _canon(_locate_up_crossing(p, eps))
        return SignClass("ChangesSign", _witnesses(p, eps), t0, touch)
    if saw_pos:
        return SignClass("NonNegative", touches_zero=touch)
    if saw_neg:
        return SignClass("NonPositive", touches_zero=touch)
    return SignClass("IdenticallyZero", touches_zero=True)


def _locate_up_crossing(p, eps):
    """A point where p passes strictly from - to +.

    A continuous periodic function taking both signs has at least one such
    crossing, so the scan below only needs enough resolution to see it.
    """
    n = max(4096, 64 * p.degree)
    while n <= 2 ** 22:
        ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
        v = p(ts)
        w = np.roll(v, -1)
        up = np.nonzero((v < 0) & (w >= 0))[0]
        if len(up):
            i = int(up[0])
            j = (i + 1) % n
            if w[i] == 0.0:
                return float(ts[j])
            b = ts[j] if j else TWO_PI
            return brentq(p, ts[i], b, xtol=1e-15)
        n *= 8
    raise CertificationFailure("could not isolate the - to + crossing")


def _witnesses(p, eps):
    """Grid points of largest margin on each side of zero."""
    ts = np.linspace(0.0, TWO_PI, max(4096, 64 * p.degree), endpoint=False)
    v = p(ts)
    i, j = int(np.argmin(v)), int(np.argmax(v))
    if not (v[i] < -eps and v[j] > eps):
        raise CertificationFailure("sign-change witnesses lack a certified margin")
    return (float(ts[i]), float(ts[j]))


def max_on_period(p, grid=None):
    """Global maximum ``(M, t*)`` of p on [0, 2pi]; ties go to the smallest t.

    ``p`` is a TrigPoly or an Antiderivative (whose slope may be nonzero, in
    which case the endpoint 2pi is a genuine candidate).
    """
    if isinstance(p, TrigPoly) and p.is_constant:
        return p.mean, 0.0
    dp = p.derivative()
    deg = dp.degree if isinstance(dp, TrigPoly) else 1
    if deg == 0:
        slope = dp.mean
        return (float(p(TWO_PI)), TWO_PI) if slope > 0 else (float(p(0.0)), 0.0)
    n = grid or max(2048, 64 * deg)
    ts = np.linspace(0.0, TWO_PI, n + 1)
    dv = dp(ts)
    cands = [0.0, TWO_PI]
    for i in range(n):
        if dv[i] > 0 and dv[i + 1] <= 0:
            if dv[i + 1] == 0:
                cands.append(float(ts[i + 1]))
            else:
                cands.append(brentq(dp, ts[i], ts[i + 1], xtol=1e-15))
    v = p(ts)
    cands.append(float(ts[int(np.argmax(v))]))
    best_t, best_v = None, -math.inf
    for t in sorted(cands):
        val = float(p(t))
        if val > best_v + 1e-12:
            best_t, best_v = t, val
    if best_t == TWO_PI and abs(float(p(0.0)) - best_v) <= 1e-12:
        best_t = 0.0
    return best_v, best_t
