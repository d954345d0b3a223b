"""Harmonic analysis on S^3 = SU(2) in Euler angles.

Representation labels are stored doubled: ``twoEll = 2*ell``, ``twoM = 2*m``.
Matrix rows and columns of ``t^ell`` run over m = -ell, ..., ell, so index
``i`` corresponds to ``twoM = -twoEll + 2*i``.

Convention (pinned by tests):

    t^ell(phi, theta, psi)_{mn} = exp(-i m phi) d^ell_{mn}(theta) exp(-i n psi)

with phi in [0, 2pi), theta in [0, pi], psi in [0, 4pi).  The neutral field
``d0`` acts as ``-d/dpsi``; it multiplies t_{mn} by ``i n``, i.e. it is right
multiplication by ``diag(i m)``.  The normalised Haar measure is
``sin(theta) dtheta dphi dpsi / (16 pi^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InsufficientData, ModeOutOfRange

MAX_TWO_ELL = 512


@dataclass(frozen=True, order=True)
class ModeIndex:
    twoEll: int
    twoM: int
    twoN: int

    def __post_init__(self):
        e, m, n = self.twoEll, self.twoM, self.twoN
        if e < 0 or abs(m) > e or abs(n) > e or (e - m) % 2 or (e - n) % 2:
            raise ModeOutOfRange(f"invalid mode (2l, 2m, 2n) = ({e}, {m}, {n})")

    @property
    def ell(self) -> float:
        return self.twoEll / 2

    @property
    def m(self) -> float:
        return self.twoM / 2

    @property
    def n(self) -> float:
        return self.twoN / 2

    @property
    def row(self) -> int:
        return (self.twoM + self.twoEll) // 2

    @property
    def col(self) -> int:
        return (self.twoN + self.twoEll) // 2


def m_values(twoEll: int) -> np.ndarray:
    """The values m = -ell, ..., ell as floats."""
    return (np.arange(twoEll + 1) * 2 - twoEll) / 2.0


def iter_modes(twoEllMax: int, twoEllMin: int = 0):
    for e in range(twoEllMin, twoEllMax + 1):
        for m in range(-e, e + 1, 2):
            for n in range(-e, e + 1, 2):
                yield ModeIndex(e, m, n)


# --------------------------------------------------------------------------
# Wigner matrices


@lru_cache(maxsize=None)
def _jy_eigen(twoEll: int):
    """Eigen-decomposition of J_y in the |m> basis."""
    j = twoEll / 2
    m = m_values(twoEll)
    Jy = np.zeros((twoEll + 1, twoEll + 1), dtype=complex)
    for i in range(twoEll):
        c = math.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
        Jy[i + 1, i] = -0.5j * c
        Jy[i, i + 1] = 0.5j * c
    lam, V = np.linalg.eigh(Jy)
    return np.round(2 * lam) / 2, V


def wigner_d(twoEll: int, theta) -> np.ndarray:
    """Real little-d matrices d^ell(theta); shape ``theta.shape + (d, d)``.

    Computed as exp(-i theta J_y) from the (exact) spectrum of J_y, which is
    stable for all ell, unlike the alternating factorial sum.
    """
    if twoEll < 0 or twoEll > MAX_TWO_ELL:
        raise ModeOutOfRange(f"twoEll={twoEll} outside supported range")
    theta = np.asarray(theta, dtype=float)
    lam, V = _jy_eigen(twoEll)
    ph = np.exp(-1j * theta[..., None] * lam)
    d = np.einsum("ik,...k,jk->...ij", V, ph, V.conj())
    return d.real.copy()


def wigner_d_sum(twoEll: int, theta: float) -> np.ndarray:
    """Little-d via the explicit factorial sum (reference implementation)."""
    j2 = twoEll
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    out = np.zeros((j2 + 1, j2 + 1))
    lf = lambda x: math.lgamma(x + 1)
    for a in range(j2 + 1):
        m2 = -j2 + 2 * a
        for b in range(j2 + 1):
            n2 = -j2 + 2 * b
            jpm, jmm = (j2 + m2) // 2, (j2 - m2) // 2
            jpn, jmn = (j2 + n2) // 2, (j2 - n2) // 2
            mmn = (m2 - n2) // 2
            pref = 0.5 * (lf(jpm) + lf(jmm) + lf(jpn) + lf(jmn))
            total = 0.0
            for k in range(max(0, -mmn), min(jpn, jmm) + 1):
                logt = pref - lf(jpn - k) - lf(k) - lf(mmn + k) - lf(jmm - k)
                pc, ps = j2 - mmn - 2 * k, mmn + 2 * k
                term = math.exp(logt) * c ** pc * s ** ps
                total += -term if (mmn + k) % 2 else term
            out[a, b] = total
    return out


def wigner_matrix(twoEll: int, euler) -> np.ndarray:
    """t^ell at Euler angles ``(phi, theta, psi)`` (arrays broadcast)."""
    phi, theta, psi = (np.asarray(x, dtype=float) for x in euler)
    phi, theta, psi = np.broadcast_arrays(phi, theta, psi)
    m = m_values(twoEll)
    d = wigner_d(twoEll, theta)
    left = np.exp(-1j * phi[..., None] * m)[..., :, None]
    right = np.exp(-1j * psi[..., None] * m)[..., None, :]
    return left * d * right


def neutral_symbol(twoEll: int) -> np.ndarray:
    return np.diag(1j * m_values(twoEll))


def su2_from_euler(phi, theta, psi) -> np.ndarray:
    """The 2x2 matrix t^{1/2}(phi, theta, psi)."""
    return wigner_matrix(1, (phi, theta, psi))


def euler_from_su2(U: np.ndarray):
    """Inverse of :func:`su2_from_euler` with phi in [0,2pi), psi in [0,4pi)."""
    # row 0 <-> m = -1/2:  U00 = e^{i(phi+psi)/2} cos,  U01 = e^{i(phi-psi)/2} sin
    theta = 2.0 * math.atan2(abs(U[0, 1]), abs(U[0, 0]))
    sigma = 2.0 * np.angle(U[0, 0]) if abs(U[0, 0]) > 1e-300 else 0.0
    delta = 2.0 * np.angle(U[0, 1]) if abs(U[0, 1]) > 1e-300 else 0.0
    phi = 0.5 * (sigma + delta)
    psi = 0.5 * (sigma - delta)
    shift = 2 * math.pi * math.floor(phi / (2 * math.pi))
    phi -= shift
    psi = (psi - shift) % (4 * math.pi)
    if phi >= 2 * math.pi:
        phi -= 2 * math.pi
        psi = (psi - 2 * math.pi) % (4 * math.pi)
    # the sign ambiguity of theta -> -theta does not arise since theta >= 0
    V = su2_from_euler(phi, theta, psi)
    if np.abs(V - U).max() > 1e-8:
        psi = (psi + 2 * math.pi) % (4 * math.pi)
    return phi, theta, psi


# --------------------------------------------------------------------------
# quadrature and transforms


@dataclass(frozen=True)
class EulerGrid:
    """Product quadrature on S^3, exact for band-limited integrands."""

    nphi: int
    ntheta: int
    npsi: int

    @classmethod
    def for_band(cls, twoEllMax: int) -> EulerGrid:
        return cls(twoEllMax + 1, twoEllMax // 2 + 2, 2 * twoEllMax + 1)

    @property
    def phi(self):
        return 2 * np.pi * np.arange(self.nphi) / self.nphi

    @property
    def psi(self):
        return 4 * np.pi * np.arange(self.npsi) / self.npsi

    @property
    def theta(self):
        x, _ = np.polynomial.legendre.leggauss(self.ntheta)
        return np.arccos(x)

    @property
    def theta_weights(self):
        _, w = np.polynomial.legendre.leggauss(self.ntheta)
        return w / 2.0

    def mesh(self):
        return np.meshgrid(self.phi, self.theta, self.psi, indexing="ij")

    def integrate(self, values) -> complex:
        """Haar integral of samples on the (..., phi, theta, psi) mesh."""
        w = self.theta_weights / (self.nphi * self.npsi)
        return np.einsum("...ijk,j->...", values, w)


def analyze(values, grid: EulerGrid, twoEllMax: int) -> dict:
    """Coefficients f^(ell)_{mn} = int f conj(t^ell_{nm}) of gridded samples.

    ``values`` has shape ``(..., nphi, ntheta, npsi)``; the result maps
    twoEll to arrays of shape ``(..., d, d)`` indexed [row m, col n].
    """
    values = np.asarray(values, dtype=complex)
    phi, theta, psi = grid.phi, grid.theta, grid.psi
    wth = grid.theta_weights
    out = {}
    for e in range(twoEllMax + 1):
        mv = m_values(e)
        Ephi = np.exp(1j * np.outer(phi, mv)) / grid.nphi  # [phi, n]
        Epsi = np.exp(1j * np.outer(psi, mv)) / grid.npsi  # [psi, m]
        d = wigner_d(e, theta)  # [theta, n(row), m(col)]
        X = np.einsum("...ijk,in->...njk", values, Ephi)
        Y = np.einsum("...njk,km->...njm", X, Epsi)
        out[e] = np.einsum("...njm,jnm,j->...mn", Y, d, wth)
    return out


def synthesize_grid(coeffs: dict, grid: EulerGrid) -> np.ndarray:
    """Evaluate sum (2l+1) tr(f^(l) t^l) on the Euler mesh."""
    phi, theta, psi = grid.phi, grid.theta, grid.psi
    out = None
    for e, A in coeffs.items():
        A = np.asarray(A, dtype=complex)
        mv = m_values(e)
        Ephi = np.exp(-1j * np.outer(phi, mv))  # [phi, n]
        Epsi = np.exp(-1j * np.outer(psi, mv))  # [psi, m]
        d = wigner_d(e, theta)  # [theta, n, m]
        G = np.einsum("...mn,jnm->...nmj", A, d)
        H = np.einsum("...nmj,km->...njk", G, Epsi)
        term = (e + 1) * np.einsum("...njk,in->...ijk", H, Ephi)
        out = term if out is None else out + term
    if out is None:
        raise ModeOutOfRange("no coefficients to synthesise")
    return out


def synthesize_points(coeffs: dict, euler) -> np.ndarray:
    """Evaluate the truncated series at scattered Euler-angle points."""
    out = 0.0
    for e, A in coeffs.items():
        T = wigner_matrix(e, euler)
        out = out + (e + 1) * np.einsum("...mn,...nm->...", np.asarray(A), T)
    return out


def plancherel_norm(coeffs: dict) -> float:
    """sqrt(sum (2l+1) ||f^(l)||_HS^2); extra leading axes are summed too."""
    total = 0.0
    for e, A in coeffs.items():
        total += (e + 1) * float(np.sum(np.abs(np.asarray(A)) ** 2))
    return math.sqrt(total)


# --------------------------------------------------------------------------
# decay classification


@dataclass(frozen=True)
class DecayReport:
    model: str  # "Exponential" | "Polynomial" | "Growth" | "Indeterminate"
    params: dict
    residual: float
    samples: int
    residuals: dict

    def to_json(self):
        return {"model": self.model, "params": self.params, "residual": self.residual,
                "samples": self.samples, "residuals": self.residuals}


RESIDUAL_FLOOR = 1e-10


def _lsq(x, y):
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ coef
    return coef, float(np.sqrt(np.mean(r ** 2)))


def fit_decay_sequence(ells, magnitudes) -> DecayReport:
    """Choose between  C e^{-B l}  and  C l^p  (or C (1+l)^p)  on a sequence.

    ``ells`` are the actual values of ell (not doubled).  Non-positive
    magnitudes are dropped.  Indeterminate is reported when the two model
    families fit equally well (residuals within 10%).
    """
    ells = np.asarray(ells, dtype=float)
    mags = np.asarray(magnitudes, dtype=float)
    keep = mags > 0
    ells, mags = ells[keep], mags[keep]
    if len(np.unique(ells)) < 6:
        raise InsufficientData("fit_decay needs at least 6 distinct ell values with nonzero data")
    y = np.log(mags)
    (c_e, slope_e), r_exp = _lsq(ells, y)
    fits = {"1+l": _lsq(np.log1p(ells), y)}
    if ells.min() > 0:
        fits["l"] = _lsq(np.log(ells), y)
    var = min(fits, key=lambda k: fits[k][1])
    (c_p, order), r_pow = fits[var]
    residuals = {"exponential": r_exp, "power": r_pow}
    fe, fp = max(r_exp, RESIDUAL_FLOOR), max(r_pow, RESIDUAL_FLOOR)
    x_pow = np.log1p(ells) if var == "1+l" else np.log(ells)
    B = -slope_e
    if fe == fp == RESIDUAL_FLOOR:
        # only a constant sequence is fitted exactly by both families
        C = float(mags.max())
        return DecayReport("Growth", {"K": 0.0, "C": C, "variable": var}, r_pow, len(ells), residuals)
    if max(fe, fp) <= 1.1 * min(fe, fp):
        return DecayReport("Indeterminate", {"B": B, "order": float(order)}, min(r_exp, r_pow),
                           len(ells), residuals)
    if fe < fp:
        if B > 0:
            C = float(np.max(mags * np.exp(B * ells)))
            return DecayReport("Exponential", {"B": float(B), "C": C}, r_exp, len(ells), residuals)
        C = float(np.max(mags * np.exp(B * ells)))
        return DecayReport("Growth", {"K": math.inf, "rate": float(-B), "C": C}, r_exp,
                           len(ells), residuals)
    C = float(np.max(mags / np.exp(order * x_pow)))
    if order < 0:
        return DecayReport("Polynomial", {"order": float(order), "C": C, "variable": var},
                           r_pow, len(ells), residuals)
    return DecayReport("Growth", {"K": float(order), "C": C, "variable": var}, r_pow,
                       len(ells), residuals)
