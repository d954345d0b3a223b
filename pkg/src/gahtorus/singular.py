"""Explicit non-analytic solutions certifying failure of GAH.

Two constructions are provided.

* Sign-changing Im c: after normalising b to cross zero from - to + at t = 0
  with nonpositive mean, the data

      f^(t, l)_ll = d_l e^{-l psi(t)},   d_l = 1 - e^{-2 pi (i l c0 + q)},
      u^(t, l)_ll = int_0^{2pi} e^{-q s} e^{-l Phi(t, s)} ds,

  give an analytic f and a bounded u with |u^(t*, l)| of order l^{-1/2}.
* Resonant modes: when i m c0 + q lies in iZ the homogeneous mode equation
  has a bounded periodic solution of modulus one at its peak, for every l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (KSearchFailed, NotResonant, NotSignChanging, QuadratureUnderResolved,
                     ResonantGamma)
from .fields import SparseModalField, t_grid
from .operators import OperatorSpec
from .solver import RESONANCE_TOL, check_grid, distance_to_iZ
from .su2 import DecayReport, ModeIndex, fit_decay_sequence
from .torus import TrigPoly, classify_sign, max_on_period

TWO_PI = 2 * math.pi
PHI_TOL = 1e-12
K_GRID = 2048
K_CAP_EXPONENT = 20
GL_NODES = 16
QUAD_TOL = 1e-6


@dataclass(frozen=True)
class SignTransform:
    """spec'.c(t) = sign * spec.c(t + shift).

    ``sign = -1`` is the automorphism m -> -m of the representations (it
    reverses d_0); ``shift`` is a translation in t.  Mode (l, m, n) of the
    normalised problem at time t corresponds to mode (l, sign m, sign n) of
    the original one at time t + shift.
    """

    sign: int
    shift: float

    def to_original_time(self, t):
        return np.mod(np.asarray(t, dtype=float) + self.shift, TWO_PI)

    def to_original_twoM(self, twoM: int) -> int:
        return self.sign * twoM

    def apply(self, spec: OperatorSpec) -> OperatorSpec:
        a, b = spec.a, spec.b
        if self.sign < 0:
            a, b = -a, -b
        return OperatorSpec(a.translate(self.shift), b.translate(self.shift), spec.q)

    def to_json(self):
        return {"sign": self.sign, "shift": self.shift}


def normalize_sign_change(spec: OperatorSpec):
    """Translate (and reflect if b0 > 0) so b goes from - to + at 0 and b0 <= 0."""
    sc = classify_sign(spec.b)
    if sc.tag != "ChangesSign":
        raise NotSignChanging(f"Im c is {sc.tag}; no sign change to exploit")
    sign = 1
    b = spec.b
    if spec.b0.value > 0:
        sign = -1
        b = -b
        sc = classify_sign(b)
    shift = float(sc.crossing)
    tr = SignTransform(sign, shift)
    return tr.apply(spec), tr


# --------------------------------------------------------------------------
# phase functions


@dataclass
class Phases:
    """B, M, t*, K and the functions psi, Phi, phi of a normalised spec."""

    spec: OperatorSpec
    M: float
    tStar: float
    K: float

    def __post_init__(self):
        self._B = self.spec.b.antiderivative()
        self._A = self.spec.a.antiderivative()
        self.a_at_0 = float(self.spec.a(0.0))
        self.A_tStar = float(self._A(self.tStar))

    def B(self, t):
        return self._B(t)

    def psi(self, t):
        t = np.asarray(t, dtype=float)
        return self.M + self.K * (1 - np.cos(t)) + 1j * (self.a_at_0 * np.sin(t) - self.A_tStar)

    def Phi(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.psi(t - s) + 1j * (self.spec.C(t) - self.spec.C(t - s))

    def phi(self, t, s):
        """-Re Phi = B(t) - B(t - s) - M - K (1 - cos(t - s))."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.B(t) - self.B(t - s) - self.M - self.K * (1 - np.cos(t - s))

    def phi_hol(self, z):
        """The phase -iC(z) + K(1 - cos z) + i a(0) sin z near the critical point 0."""
        return -1j * self.spec.C(z) + self.K * (1 - np.cos(z)) + 1j * self.a_at_0 * np.sin(z)

    def with_K(self, K) -> Phases:
        return Phases(self.spec, self.M, self.tStar, K)


def maximum_of_B(spec: OperatorSpec):
    M, tStar = max_on_period(spec.b.antiderivative())
    return float(M), float(tStar)


def _grid_phi_max(ph: Phases, n: int) -> float:
    """max of phi over the (n x n) grid of [0, 2pi]^2, endpoints included.

    t - s only takes the 2n - 1 values h (i - j), so B(t - s) and
    cos(t - s) are evaluated on that vector and gathered.
    """
    h = TWO_PI / (n - 1)
    t = h * np.arange(n)
    diffs = h * np.arange(-(n - 1), n)
    Bd = ph.B(diffs)
    cd = 1 - np.cos(diffs)
    Bt = ph.B(t)
    idx = np.arange(n)[:, None] - np.arange(n)[None, :] + (n - 1)
    vals = Bt[:, None] - Bd[idx] - ph.M - ph.K * cd[idx]
    return float(vals.max())


def _tstar_margin(ph: Phases, n: int):
    """min of Re Phi(t*, s) over grid s with |s - t*| >= h, and the margin asked for."""
    h = TWO_PI / (n - 1)
    s = h * np.arange(n)
    far = np.abs(s - ph.tStar) >= h * (1 - 1e-9)
    sig = ph.tStar - s[far]
    vals = ph.B(sig) + ph.K * (1 - np.cos(sig))
    return float(vals.min()), 0.5 * ph.K * (1 - math.cos(h))


def choose_K(spec: OperatorSpec, n: int = K_GRID) -> float:
    """Smallest K = K1 2^j (K1 = b'(0) + 1) passing both grid certifications."""
    M, tStar = maximum_of_B(spec)
    K1 = float(spec.b.derivative()(0.0)) + 1.0
    base = Phases(spec, M, tStar, K1)
    for j in range(K_CAP_EXPONENT + 1):
        ph = base.with_K(K1 * 2 ** j)
        if _grid_phi_max(ph, n) > PHI_TOL:
            continue
        lo, margin = _tstar_margin(ph, n)
        if lo >= margin:
            return ph.K
    raise KSearchFailed(f"no K <= {K1} * 2^{K_CAP_EXPONENT} certified on the {n}^2 grid")


def phase_checks(ph: Phases, n: int = K_GRID, h: float = 1e-4) -> dict:
    """Grid bound on phi, corner identities and the critical point of phi_hol."""
    b0 = ph.spec.b0.value
    corners = {"phi(2pi,0)": float(ph.phi(TWO_PI, 0.0)), "expected(2pi,0)": -ph.M,
               "phi(0,2pi)": float(ph.phi(0.0, TWO_PI)), "expected(0,2pi)": TWO_PI * b0 - ph.M}
    f0 = complex(ph.phi_hol(0.0))
    fp, fm = complex(ph.phi_hol(h)), complex(ph.phi_hol(-h))
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / h ** 2
    cprime = complex(ph.spec.a.derivative()(0.0) + 1j * ph.spec.b.derivative()(0.0))
    lo, margin = _tstar_margin(ph, n)
    return {
        "phi_grid_max": _grid_phi_max(ph, n),
        "corners": corners,
        "corner_error": max(abs(corners["phi(2pi,0)"] - corners["expected(2pi,0)"]),
                            abs(corners["phi(0,2pi)"] - corners["expected(0,2pi)"])),
        "phi_hol_0": abs(f0),
        "phi_hol_1": abs(d1),
        "phi_hol_2": [d2.real, d2.imag],
        "phi_hol_2_expected": [ph.K + cprime.imag, -cprime.real],
        "phi_hol_2_error": abs(d2 - (ph.K - 1j * cprime)),
        "Phi_tstar_tstar": abs(complex(ph.Phi(ph.tStar, ph.tStar))),
        "tstar_min_RePhi": lo,
        "tstar_margin": margin,
    }


# --------------------------------------------------------------------------
# quadrature of u^


def _composite_gl(panels: int):
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    h = TWO_PI / panels
    left = h * np.arange(panels)
    s = (left[:, None] + 0.5 * h * (x[None, :] + 1)).ravel()
    ws = np.tile(0.5 * h * w, panels)
    return s, ws


def u_hat(ph: Phases, t, twoElls, panels: int, chunk: int = 256) -> np.ndarray:
    """int_0^{2pi} e^{-q s} e^{-l Phi(t, s)} ds for each twoEll (rows) and t (columns)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s, w = _composite_gl(panels)
    q = ph.spec.q.value
    logw = np.log(w) - q * s
    out = np.zeros((len(twoElls), len(t)), dtype=complex)
    for i0 in range(0, len(t), chunk):
        tt = t[i0:i0 + chunk]
        Phi = ph.Phi(tt[:, None], s[None, :])
        for r, e in enumerate(twoElls):
            ex = -(e / 2) * Phi + logw[None, :]
            ex.real = np.maximum(ex.real, -745.0)
            out[r, i0:i0 + chunk] = np.exp(ex).sum(axis=1)
    return out


def resolve_panels(ph: Phases, twoEllMax: int, start: int = 64, cap: int = 1 << 14):
    """Double the panel count until u^(t*, lmax) is stable; returns (panels, change)."""
    p = start
    prev = u_hat(ph, [ph.tStar], [twoEllMax], p)[0, 0]
    while p < cap:
        cur = u_hat(ph, [ph.tStar], [twoEllMax], 2 * p)[0, 0]
        change = abs(cur - prev) / max(abs(cur), 1e-300)
        p *= 2
        if change < 1e-12:
            return p, change
        prev = cur
    if change > QUAD_TOL:
        raise QuadratureUnderResolved(
            f"u^(t*, l={twoEllMax / 2}) changed by {change:.2e} at {p} panels")
    return p, change


# --------------------------------------------------------------------------
# sign-change witness


@dataclass
class SingularData:
    tStar: float
    M: float
    K: float
    t: np.ndarray
    psi: np.ndarray
    dEll: dict
    fField: SparseModalField
    uField: SparseModalField
    decayF: DecayReport
    decayU: DecayReport
    phases: Phases
    transform: SignTransform
    u_at_tstar: dict
    f_at_tmin: dict
    tMin: float
    panels: int
    residuals: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def csv(self) -> str:
        rows = ["twoEll,|f_hat_at_tmin|,|u_hat_at_tstar|"]
        for e in sorted(self.u_at_tstar):
            rows.append(f"{e},{abs(self.f_at_tmin[e])!r},{abs(self.u_at_tstar[e])!r}")
        return "\n".join(rows) + "\n"

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def summary(self) -> dict:
        return {
            "tStar": self.tStar, "M": self.M, "K": self.K, "tMin": self.tMin,
            "transform": self.transform.to_json(), "panels": self.panels, "N": len(self.t),
            "decayF": self.decayF.to_json(), "decayU": self.decayU.to_json(),
            "u_sup": self.uField.sup_norm(),
            "u_bound": TWO_PI * math.exp(abs(TWO_PI * self.phases.spec.q.re.value)),
            "max_mode_residual": self.max_residual,
            "checks": self.checks,
        }


def _check_no_diagonal_resonance(spec: OperatorSpec, twoEllMax: int):
    bad = [e for e in range(1, twoEllMax + 1) if distance_to_iZ(spec.gamma(e)) <= RESONANCE_TOL]
    if bad:
        raise ResonantGamma(f"d_l vanishes for twoEll in {bad[:8]}; use the resonant witness",
                            [(e, e) for e in bad])


def build_sign_change_witness(spec: OperatorSpec, twoEllMax: int = 256, N: int = 1024,
                              fit_from: int = 16, K: float | None = None) -> SingularData:
    """f analytic, u bounded, P u = f, and u^(t*, l) ~ l^{-1/2}.

    Everything is computed for the normalised operator; ``transform`` maps
    times and modes back to the original one.
    """
    check_grid(N)
    nspec, tr = normalize_sign_change(spec)
    _check_no_diagonal_resonance(nspec, twoEllMax)
    M, tStar = maximum_of_B(nspec)
    K = choose_K(nspec) if K is None else float(K)
    ph = Phases(nspec, M, tStar, K)
    panels, _ = resolve_panels(ph, twoEllMax)
    t = t_grid(N)
    twoElls = list(range(1, twoEllMax + 1))
    psi = ph.psi(t)
    q = nspec.q.value
    c0 = nspec.c0.value
    dEll = {e: 1 - np.exp(-TWO_PI * (1j * (e / 2) * c0 + q)) for e in twoElls}
    U = u_hat(ph, t, twoElls, panels)
    fF, uF = SparseModalField(N, twoEllMax), SparseModalField(N, twoEllMax)
    residuals = {}
    for r, e in enumerate(twoElls):
        mode = ModeIndex(e, e, e)
        fe = dEll[e] * np.exp(-(e / 2) * psi)
        fF.data[mode] = fe
        uF.data[mode] = U[r]
        res = nspec.mode_operator(e, U[r]) - fe
        residuals[e] = float(np.max(np.abs(res)))
    # Re psi = M + K(1 - cos t) is smallest at t = 0
    tMin = 0.0
    u_star = u_hat(ph, [tStar], twoElls, panels)[:, 0]
    u_at = {e: complex(u_star[r]) for r, e in enumerate(twoElls)}
    f_at = {e: complex(dEll[e] * np.exp(-(e / 2) * ph.psi(tMin))) for e in twoElls}
    fit_e = [e for e in twoElls if e >= fit_from]
    ells = np.array([e / 2 for e in fit_e])
    decayF = fit_decay_sequence(ells, [abs(f_at[e]) for e in fit_e])
    decayU = fit_decay_sequence(ells, [abs(u_at[e]) for e in fit_e])
    return SingularData(tStar, M, K, t, psi, dEll, fF, uF, decayF, decayU, ph, tr, u_at, f_at,
                        tMin, panels, residuals, phase_checks(ph))


# --------------------------------------------------------------------------
# resonant witness


def resonant_profile(spec: OperatorSpec, twoM: int):
    """(t_j, u) where u solves u' + (i m c + q) u = 0, |u| <= 1 and u(t_j) = 1.

    u(t) = exp(-(G(t) - G(t_j))) with G(t) = int_0^t (i m c + q); t_j is where
    Re G is smallest, i.e. where int_0^t (m b - Re q) is largest.
    """
    gam = spec.gamma(twoM)
    if distance_to_iZ(gam) > RESONANCE_TOL:
        raise NotResonant(f"i m c0 + q = {gam} is not in iZ for twoM={twoM}")
    m = twoM / 2
    h = spec.b.scale(m) + TrigPoly.constant(-spec.q.re.value)
    Mj, tj = max_on_period(h.antiderivative())
    q = spec.q.value

    def G(t):
        return 1j * m * spec.C(t) + q * np.asarray(t, dtype=float)

    Gj = complex(G(tj))
    return float(tj), float(Mj), (lambda t: np.exp(-(G(t) - Gj)))


def build_resonant_witness(spec: OperatorSpec, resonantModes, twoEllMax: int = 64,
                           N: int = 512) -> SparseModalField:
    """Bounded solution of P u = 0 with |u^(t_j, l)_{m m}| = 1 for every l >= |m|."""
    check_grid(N)
    t = t_grid(N)
    out = SparseModalField(N, twoEllMax)
    for _k, twoM in resonantModes:
        tj, Mj, prof = resonant_profile(spec, int(twoM))
        vals = prof(t)
        for e in range(abs(twoM), twoEllMax + 1, 2):
            mode = ModeIndex(e, twoM, twoM)
            out.data[mode] = vals.copy()
            out.meta[mode] = (tj, complex(prof(tj)))
    return out


def resonant_residual(spec: OperatorSpec, fld: SparseModalField) -> float:
    return max((float(np.max(np.abs(spec.mode_operator(mode.twoM, v)))) for mode, v in
                fld.entries()), default=0.0)
