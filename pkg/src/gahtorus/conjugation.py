"""Conjugations that reduce P to simpler operators.

* The gauge map Psi_a multiplies mode (l, m, n) by e^{i m A(t)}, where A is the
  periodic part of int_0^t a.  When Im c = 0 it intertwines
  P = d_t + a(t) d_0 + q with P0 = d_t + a0 d_0 + q.
* For a zero order term q(t, x) with (d_t + c d_0) Q = q - q0 one has
  P o e^{-Q} = e^{-Q} o P00 with P00 = d_t + c(t) d_0 + q0.

On Euler-angle grids d_0 acts as -d/dpsi (psi has period 4pi), which is the
right multiplication of each coefficient matrix by diag(i m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, HypothesisFails
from .fields import ModalField, SparseModalField, dump_euler_grid, load_euler_grid, t_grid
from .numbers import ComplexParam
from .operators import OperatorSpec, spectral_derivative
from .su2 import EulerGrid, ModeIndex, wigner_matrix
from .torus import TrigPoly

HYPOTHESIS_TOL = 1e-8


# --------------------------------------------------------------------------
# gauge map on modal fields


def _gauge_factor(a: TrigPoly, twoM: int, t, direction: int):
    return np.exp(direction * 1j * (twoM / 2) * a.antiderivative().base(t))


def psi_a_apply(fld, a: TrigPoly, direction: int = 1):
    """Multiply each (l, m, n) entry by e^{+-i m A(t)} samplewise."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    t = t_grid(fld.N)
    if isinstance(fld, SparseModalField):
        out = SparseModalField(fld.N, fld.twoEllMax, {}, dict(fld.meta))
        for mode, v in fld.entries():
            out.data[mode] = _gauge_factor(a, mode.twoM, t, direction) * v
        return out
    out = ModalField(fld.N, fld.twoEllMax, {})
    for e, A in fld.coeffs.items():
        twoMs = np.arange(-e, e + 1, 2)
        F = np.stack([_gauge_factor(a, m, t, direction) for m in twoMs], axis=1)
        out.coeffs[e] = F[:, :, None] * A
    return out


def apply_modal(spec: OperatorSpec, fld: ModalField) -> ModalField:
    """(d_t + i m c(t) + q) on every row m, derivatives taken spectrally."""
    out = ModalField(fld.N, fld.twoEllMax, {})
    for e, A in fld.coeffs.items():
        B = np.empty_like(A)
        for i in range(e + 1):
            B[:, i, :] = spec.mode_operator(-e + 2 * i, A[:, i, :])
        out.coeffs[e] = B
    return out


def verify_intertwine(spec: OperatorSpec, fld: ModalField) -> float:
    """max over modes of |P0(Psi_a u) - Psi_a(P u)|; requires Im c = 0."""
    if not spec.b.is_constant or spec.b.mean != 0.0:
        raise ConfigError("the gauge map intertwines P and P0 only when Im c = 0")
    p0 = OperatorSpec(TrigPoly.constant(spec.a0), spec.b, spec.q)
    lhs = apply_modal(p0, psi_a_apply(fld, spec.a))
    rhs = psi_a_apply(apply_modal(spec, fld), spec.a)
    return lhs.max_abs_diff(rhs)


# --------------------------------------------------------------------------
# functions on Euler-angle grids


@dataclass
class EulerGridFn:
    """Samples on the (t, phi, theta, psi) product grid; t uniform on [0, 2pi)."""

    values: np.ndarray
    grid: EulerGrid

    @property
    def Nt(self) -> int:
        return self.values.shape[0]

    @property
    def t(self):
        return t_grid(self.Nt)

    @classmethod
    def from_function(cls, fn, Nt: int, grid: EulerGrid) -> EulerGridFn:
        """Sample fn(t, phi, theta, psi) (broadcasting) on the grid."""
        t = t_grid(Nt)[:, None, None, None]
        ph, th, ps = (x[None] for x in grid.mesh())
        vals = np.broadcast_to(fn(t, ph, th, ps), (Nt,) + ph.shape[1:]).astype(complex)
        return cls(np.array(vals), grid)

    @classmethod
    def constant(cls, value, Nt: int, grid: EulerGrid) -> EulerGridFn:
        shape = (Nt, grid.nphi, grid.ntheta, grid.npsi)
        return cls(np.full(shape, complex(value)), grid)

    def dt(self) -> np.ndarray:
        return spectral_derivative(self.values)

    def d0(self) -> np.ndarray:
        """-d/dpsi, spectral on the 4pi-periodic psi axis."""
        n = self.grid.npsi
        k = np.fft.fftfreq(n, 1.0 / n) / 2.0
        if n % 2 == 0:
            k[n // 2] = 0.0
        V = np.fft.fft(self.values, axis=-1)
        return -np.fft.ifft(1j * k * V, axis=-1)

    def __mul__(self, other):
        o = other.values if isinstance(other, EulerGridFn) else other
        return EulerGridFn(self.values * o, self.grid)

    def exp(self, sign=1) -> EulerGridFn:
        return EulerGridFn(np.exp(sign * self.values), self.grid)

    def dumps(self) -> str:
        return dump_euler_grid(self.values, self.grid, self.Nt)

    @classmethod
    def loads(cls, text: str) -> EulerGridFn:
        vals, grid = load_euler_grid(text)
        return cls(vals, grid)


@dataclass(frozen=True)
class WignerSum:
    """sum_j coef_j t^{l_j}(x)_{m_j n_j}, an x-dependent band-limited function."""

    terms: tuple  # ((complex coef, ModeIndex), ...)

    @classmethod
    def from_json(cls, obj) -> WignerSum:
        out = []
        for tm in obj.get("terms", []):
            coef = ComplexParam.of(tm.get("coef", 1)).value
            out.append((coef, ModeIndex(int(tm["twoEll"]), int(tm["twoM"]), int(tm["twoN"]))))
        return cls(tuple(out))

    def evaluate(self, phi, theta, psi):
        total = 0.0
        for coef, mode in self.terms:
            T = wigner_matrix(mode.twoEll, (phi, theta, psi))
            total = total + coef * T[..., mode.row, mode.col]
        return total


def time_profile(spec: OperatorSpec, name: str):
    if name == "1":
        return lambda t: np.ones_like(t, dtype=complex)
    if name == "c":
        return spec.c
    raise ConfigError(f"unknown time factor {name!r}; use '1' or 'c'")


def apply_P_euler(spec: OperatorSpec, qfun, u: EulerGridFn) -> np.ndarray:
    """(d_t + c(t) d_0 + q) u with q a constant or an EulerGridFn."""
    c = spec.c(u.t)[:, None, None, None]
    qv = qfun.values if isinstance(qfun, EulerGridFn) else complex(qfun)
    return u.dt() + c * u.d0() + qv * u.values


def hypothesis_residual(spec: OperatorSpec, Q: EulerGridFn, q0, qfun: EulerGridFn) -> float:
    """sup |(d_t + c d_0) Q - (q - q0)|."""
    c = spec.c(Q.t)[:, None, None, None]
    lhs = Q.dt() + c * Q.d0()
    return float(np.max(np.abs(lhs - (qfun.values - complex(q0)))))


def verify_zero_order_conjugation(spec: OperatorSpec, Q: EulerGridFn, q0, u: EulerGridFn,
                                  qfun: EulerGridFn, tol: float = HYPOTHESIS_TOL) -> float:
    """sup |P(e^{-Q} u) - e^{-Q} P00 u| once the hypothesis on Q is confirmed."""
    hres = hypothesis_residual(spec, Q, q0, qfun)
    if hres >= tol:
        raise HypothesisFails(f"(d_t + c d_0)Q differs from q - q0 by {hres:.3e}", hres)
    eQ = Q.exp(-1)
    lhs = apply_P_euler(spec, qfun, eQ * u)
    rhs = eQ.values * apply_P_euler(spec, q0, u)
    return float(np.max(np.abs(lhs - rhs)))


# --------------------------------------------------------------------------
# the worked example  Q = i e^{i psi} sin(theta)


def example_Q(Nt: int, grid: EulerGrid) -> EulerGridFn:
    return EulerGridFn.from_function(lambda t, ph, th, ps: 1j * np.exp(1j * ps) * np.sin(th),
                                     Nt, grid)


def example_q(spec: OperatorSpec, q0, Q: EulerGridFn) -> EulerGridFn:
    """q = q0 - i c(t) Q, so that (d_t + c d_0) Q = q - q0 with d_0 Q = -i Q."""
    c = spec.c(Q.t)[:, None, None, None]
    return EulerGridFn(complex(q0) - 1j * c * Q.values, Q.grid)


def random_band_limited(rng: np.random.Generator, Nt: int, grid: EulerGrid, twoEllMax: int = 2,
                        tdeg: int = 3) -> EulerGridFn:
    """A random smooth u(t, x) with finitely many t- and S^3-frequencies."""
    t = t_grid(Nt)
    ph, th, ps = grid.mesh()
    out = np.zeros((Nt,) + ph.shape, dtype=complex)
    for e in range(twoEllMax + 1):
        T = wigner_matrix(e, (ph, th, ps))
        for i in range(e + 1):
            for j in range(e + 1):
                k = np.arange(-tdeg, tdeg + 1)
                a = rng.normal(size=k.size) + 1j * rng.normal(size=k.size)
                prof = (a[None, :] * np.exp(1j * np.outer(t, k))).sum(axis=1) / (e + 1)
                out += prof[:, None, None, None] * T[None, ..., i, j]
    return EulerGridFn(out, grid)
