"""Annotated real and complex parameters.

Every coefficient that enters a membership test (``x in Z``, ``x in Z/2``,
``x in Z + (a/2)Z``) is carried as a :class:`RealParam`.  A parameter either
has an exact symbolic form ``r + s*xi`` over a single irrational generator
``xi`` (a square root, a continued-fraction stream or a lacunary series), or
it is a bare float, in which case every decision made from it is flagged as
holding only at working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from mpmath import iv

FLOAT_TOL = 1e-12


def convergents(quotients):
    """Yield ``(p_n, q_n)`` for the continued fraction ``[a0; a1, a2, ...]``."""
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q


def continued_fraction(x: Fraction, max_terms=None):
    """Partial quotients of a rational number (Euclid)."""
    num, den = x.numerator, x.denominator
    out = []
    while den and (max_terms is None or len(out) < max_terms):
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return out


def _squarefree(n: int):
    """Write n = s^2 * f with f squarefree; return (s, f)."""
    s, f, d = 1, n, 2
    while d * d <= f:
        while f % (d * d) == 0:
            f //= d * d
            s *= d
        d += 1
    return s, f


# --------------------------------------------------------------------------
# irrational generators


@dataclass(frozen=True)
class Generator:
    """A fixed irrational number used as the basis element of :class:`Lin`.

    kind is one of ``"sqrt"`` (key = (d,) with d squarefree > 1), ``"cf"``
    (key = tuple of partial quotients, assumed to be the prefix of an infinite
    expansion) or ``"lacunary"`` (key = (base, exponents, next_exponent)).
    """

    kind: str
    key: tuple

    def interval(self, prec=256):
        iv.prec = prec
        if self.kind == "sqrt":
            return iv.sqrt(iv.mpf(self.key[0]))
        if self.kind == "cf":
            convs = list(convergents(self.key))
            p1, q1 = convs[-1]
            if len(convs) == 1:
                return iv.mpf([p1, p1 + 1])
            p0, q0 = convs[-2]
            lo, hi = sorted((Fraction(p0, q0), Fraction(p1, q1)))
            return iv.mpf([_iv_lo(lo), _iv_hi(hi)])
        if self.kind == "lacunary":
            base, _exps, _nxt = self.key
            s = lacunary_partial_sum(self.key)
            tail = iv.mpf(base) / (base - 1) * iv.mpf(base) ** (-iv.mpf(_nxt))
            return iv.mpf([_iv_lo(s), _iv_hi(s)]) + iv.mpf([0, tail.b])
        raise ValueError(self.kind)

    def approx(self) -> float:
        if self.kind == "sqrt":
            return math.sqrt(self.key[0])
        if self.kind == "cf":
            p, q = list(convergents(self.key))[-1]
            return p / q
        return float(lacunary_partial_sum(self.key))

    def describe(self) -> str:
        if self.kind == "sqrt":
            return f"sqrt({self.key[0]})"
        if self.kind == "cf":
            return "cf[" + ",".join(map(str, self.key[:8])) + (",...]" if len(self.key) > 8 else "]")
        base, exps, _ = self.key
        return f"sum({base}^-k, k in {list(exps)[:4]}...)"


def _iv_lo(x: Fraction):
    return iv.mpf(x.numerator) / x.denominator


def _iv_hi(x: Fraction):
    return iv.mpf(x.numerator) / x.denominator


def lacunary_partial_sum(key) -> Fraction:
    base, exps, _ = key
    return sum((Fraction(1, base ** k) for k in exps), Fraction(0))


@dataclass(frozen=True)
class Lin:
    """Exact number ``r + s*gen`` with rational r, s."""

    r: Fraction
    s: Fraction = Fraction(0)
    gen: Generator | None = None

    def __post_init__(self):
        if self.s == 0 and self.gen is not None:
            object.__setattr__(self, "gen", None)

    @property
    def is_rational(self):
        return self.gen is None

    def _same(self, other):
        return self.gen is None or other.gen is None or self.gen == other.gen

    def __add__(self, other: Lin):
        if not self._same(other):
            return None
        return Lin(self.r + other.r, self.s + other.s, self.gen or other.gen)

    def __neg__(self):
        return Lin(-self.r, -self.s, self.gen)

    def __sub__(self, other: Lin):
        return self + (-other)

    def __mul__(self, other: Lin):
        if other.gen is None:
            return Lin(self.r * other.r, self.s * other.r, self.gen)
        if self.gen is None:
            return other * self
        if self.gen == other.gen and self.gen.kind == "sqrt":
            d = self.gen.key[0]
            return Lin(self.r * other.r + self.s * other.s * d,
                       self.r * other.s + self.s * other.r, self.gen)
        return None

    def inverse(self):
        if self.gen is None:
            return Lin(1 / self.r)
        if self.gen.kind == "sqrt":
            d = self.gen.key[0]
            den = self.r * self.r - self.s * self.s * d
            return Lin(self.r / den, -self.s / den, self.gen)
        return None

    def __truediv__(self, other: Lin):
        inv = other.inverse()
        return None if inv is None else self * inv

    def is_zero(self):
        return self.r == 0 and self.s == 0

    def is_integer(self):
        return self.gen is None and self.r.denominator == 1

    def interval(self, prec=256):
        iv.prec = prec
        out = iv.mpf(self.r.numerator) / self.r.denominator
        if self.gen is not None:
            out = out + (iv.mpf(self.s.numerator) / self.s.denominator) * self.gen.interval(prec)
        return out

    def approx(self) -> float:
        v = float(self.r)
        if self.gen is not None:
            v += float(self.s) * self.gen.approx()
        return v

    def __str__(self):
        if self.gen is None:
            return str(self.r)
        return f"{self.r} + {self.s}*{self.gen.describe()}"


def quadratic_from_cf(preperiod, period) -> Lin:
    """Exact value of an eventually periodic continued fraction."""
    if not period or any(b <= 0 for b in period):
        raise ValueError("period must be a nonempty list of positive quotients")
    convs = list(convergents(period))
    P, Q = convs[-1]
    Pp, Qp = convs[-2] if len(convs) > 1 else (1, 0)
    # Q y^2 + (Qp - P) y - Pp = 0, positive root
    disc = (P - Qp) ** 2 + 4 * Q * Pp
    sq, free = _squarefree(disc)
    two_q = Fraction(1, 2 * Q)
    if free == 1:
        y = Lin(Fraction(P - Qp + sq) * two_q)
    else:
        y = Lin(Fraction(P - Qp) * two_q, Fraction(sq) * two_q, Generator("sqrt", (free,)))
    if not preperiod:
        return y
    convs = list(convergents(preperiod))
    R, S = convs[-1]
    Rp, Sp = convs[-2] if len(convs) > 1 else (1, 0)
    num = y * Lin(Fraction(R)) + Lin(Fraction(Rp))
    den = y * Lin(Fraction(S)) + Lin(Fraction(Sp))
    return num / den


def lacunary_key(base: int, exponents, next_exponent="tower"):
    exps = tuple(int(k) for k in exponents)
    if any(b <= a for a, b in zip(exps, exps[1:])) or exps[0] < 1:
        raise ValueError("lacunary exponents must be positive and strictly increasing")
    if next_exponent == "tower":
        nxt = base ** exps[-1]
    else:
        nxt = int(next_exponent)
    if nxt <= exps[-1]:
        raise ValueError("next_exponent must exceed the last listed exponent")
    return (int(base), exps, nxt)


# --------------------------------------------------------------------------
# annotated parameters


@dataclass(frozen=True)
class RealParam:
    value: float
    exact: Lin | None = None
    kind: str = "float"
    spec: dict | None = field(default=None, compare=False, repr=False)

    # construction -------------------------------------------------------
    @classmethod
    def of(cls, x) -> RealParam:
        if isinstance(x, RealParam):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a number")
        if isinstance(x, (int, Fraction)):
            fx = Fraction(x)
            return cls(float(fx), Lin(fx), "rational")
        if isinstance(x, float):
            return cls(x, None, "float")
        if isinstance(x, str):
            return cls.of(Fraction(x))
        if isinstance(x, dict):
            return cls.from_spec(x)
        raise TypeError(f"cannot interpret {x!r} as a real parameter")

    @classmethod
    def from_spec(cls, spec: dict) -> RealParam:
        kind = spec.get("kind")
        if kind == "rational":
            fx = Fraction(int(spec["p"]), int(spec.get("q", 1)))
            return cls(float(fx), Lin(fx), "rational", dict(spec))
        if kind == "quadratic":
            lin = quadratic_from_cf(list(spec.get("cf_preperiod", [])), list(spec["cf_period"]))
            k = "rational" if lin.is_rational else "quadratic"
            return cls(lin.approx(), lin, k, dict(spec))
        if kind == "cf_stream":
            qs = tuple(int(a) for a in spec["quotients"])
            if len(qs) < 2 or any(a <= 0 for a in qs[1:]):
                raise ValueError("cf_stream needs >= 2 quotients, positive after the first")
            lin = Lin(Fraction(0), Fraction(1), Generator("cf", qs))
            return cls(lin.approx(), lin, "cf_stream", dict(spec))
        if kind == "lacunary":
            extra = set(spec) - {"kind", "base", "exponents", "next_exponent"}
            if extra:
                raise ValueError(f"unknown lacunary fields {sorted(extra)}")
            key = lacunary_key(int(spec.get("base", 2)), spec["exponents"],
                               spec.get("next_exponent", "tower"))
            lin = Lin(Fraction(0), Fraction(1), Generator("lacunary", key))
            return cls(lin.approx(), lin, "lacunary", dict(spec))
        if kind == "float":
            return cls(float(spec["value"]), None, "float", dict(spec))
        raise ValueError(f"unknown NumberSpec kind {kind!r}")

    def to_spec(self) -> dict:
        if self.spec is not None:
            return dict(self.spec)
        if self.exact is not None and self.exact.is_rational:
            return {"kind": "rational", "p": self.exact.r.numerator, "q": self.exact.r.denominator}
        if self.exact is not None:
            return {"kind": "derived", "value": self.value, "exact": str(self.exact)}
        return {"kind": "float", "value": self.value}

    # arithmetic ---------------------------------------------------------
    def _lift(self, other, op, fop):
        other = RealParam.of(other)
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = op(self.exact, other.exact)
        if ex is not None:
            return RealParam(ex.approx(), ex, "rational" if ex.is_rational else "derived")
        return RealParam(fop(self.value, other.value))

    def __add__(self, o):
        return self._lift(o, lambda x, y: x + y, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, o):
        return self._lift(o, lambda x, y: x - y, lambda x, y: x - y)

    def __rsub__(self, o):
        return RealParam.of(o) - self

    def __mul__(self, o):
        return self._lift(o, lambda x, y: x * y, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._lift(o, lambda x, y: x / y, lambda x, y: x / y)

    def __neg__(self):
        if self.exact is not None:
            ex = -self.exact
            return RealParam(ex.approx(), ex, "rational" if ex.is_rational else "derived")
        return RealParam(-self.value)

    # queries ------------------------------------------------------------
    @property
    def is_exact(self):
        return self.exact is not None

    @property
    def is_rational(self):
        """True/False when known, None for bare floats."""
        if self.exact is None:
            return None
        return self.exact.is_rational

    def interval(self, prec=256):
        if self.exact is not None:
            return self.exact.interval(prec)
        iv.prec = prec
        return iv.mpf(self.value)

    def __float__(self):
        return self.value

    def __str__(self):
        return str(self.exact) if self.exact is not None else repr(self.value)


class Decision(NamedTuple):
    """Outcome of a membership test. ``result`` is None when undecidable."""

    result: bool | None
    exact: bool
    witness: tuple | None = None


def is_zero(x: RealParam, tol=FLOAT_TOL) -> Decision:
    if x.exact is not None:
        return Decision(x.exact.is_zero(), True)
    return Decision(abs(x.value) <= tol, False)


def in_lattice(x: RealParam, step=1, tol=FLOAT_TOL) -> Decision:
    """Is ``x`` an integer multiple of the rational ``step``?  Witness: the multiple."""
    step = Fraction(step)
    if x.exact is not None:
        if not x.exact.is_rational:
            return Decision(False, True)
        q = x.exact.r / step
        return Decision(q.denominator == 1, True, (int(q),) if q.denominator == 1 else None)
    q = x.value / float(step)
    n = round(q)
    hit = abs(q - n) <= tol
    return Decision(hit, False, (int(n),) if hit else None)


def in_z_plus_half_a_z(y: RealParam, a: RealParam, tol=FLOAT_TOL) -> Decision:
    """Decide ``y in Z + (a/2) Z``; witness ``(k, j)`` with ``y = k + j*a/2``."""
    if y.exact is not None and a.exact is not None:
        ye, ae = y.exact, a.exact
        if ae.is_rational:
            if not ye.is_rational:
                return Decision(False, True)
            half = ae.r / 2
            if half == 0:
                ok = ye.r.denominator == 1
                return Decision(ok, True, (int(ye.r), 0) if ok else None)
            n, d = half.numerator, half.denominator
            t = ye.r * d
            if t.denominator != 1:
                return Decision(False, True)
            t = int(t)
            # t = k*d + j*n with gcd(n, d) = 1
            j = (t * pow(n % d, -1, d)) % d if d > 1 else 0
            k = (t - j * n) // d
            return Decision(True, True, (k, j))
        if ye.gen is not None and ye.gen != ae.gen:
            return Decision(None, True)
        j = Fraction(0) if ye.gen is None else 2 * ye.s / ae.s
        if j.denominator != 1:
            return Decision(False, True)
        k = ye.r - j * ae.r / 2
        if k.denominator != 1:
            return Decision(False, True)
        return Decision(True, True, (int(k), int(j)))
    # at least one float
    if a.exact is not None and a.exact.is_rational:
        half = a.exact.r / 2
        d = half.denominator if half != 0 else 1
        t = y.value * d
        n = round(t)
        if abs(t - n) > tol * max(1, d):
            return Decision(False, False)
        sub = in_z_plus_half_a_z(RealParam.of(Fraction(n, d)), a)
        return Decision(True, False, sub.witness)
    n = round(y.value)
    if abs(y.value - n) <= tol:
        return Decision(True, False, (int(n), 0))
    return Decision(None, False)


@dataclass(frozen=True)
class ComplexParam:
    re: RealParam
    im: RealParam

    @classmethod
    def of(cls, x) -> ComplexParam:
        if isinstance(x, ComplexParam):
            return x
        if isinstance(x, complex):
            return cls(RealParam.of(x.real), RealParam.of(x.imag))
        if isinstance(x, dict) and ("re" in x or "im" in x):
            return cls(RealParam.of(x.get("re", 0)), RealParam.of(x.get("im", 0)))
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return cls(RealParam.of(x[0]), RealParam.of(x[1]))
        return cls(RealParam.of(x), RealParam.of(0))

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)

    @property
    def is_exact(self):
        return self.re.is_exact and self.im.is_exact

    def to_spec(self):
        return {"re": self.re.to_spec(), "im": self.im.to_spec()}

    def __str__(self):
        return f"({self.re}) + i({self.im})"
