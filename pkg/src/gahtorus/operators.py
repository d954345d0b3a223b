"""The operator P = d_t + c(t) d_0 + q with c = a + ib."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numbers import ComplexParam, RealParam
from .torus import TrigPoly


@dataclass(frozen=True)
class OperatorSpec:
    a: TrigPoly
    b: TrigPoly
    q: ComplexParam

    @classmethod
    def make(cls, a=0, b=0, q=0) -> OperatorSpec:
        a = a if isinstance(a, TrigPoly) else TrigPoly.from_json(a)
        b = b if isinstance(b, TrigPoly) else TrigPoly.from_json(b)
        return cls(a, b, ComplexParam.of(q))

    @classmethod
    def from_json(cls, obj: dict) -> OperatorSpec:
        return cls.make(obj.get("a", 0), obj.get("b", 0), obj.get("q", 0))

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "q": self.q.to_spec()}

    # averages -------------------------------------------------------------
    @property
    def a0(self) -> RealParam:
        return self.a.mean_param

    @property
    def b0(self) -> RealParam:
        return self.b.mean_param

    @property
    def c0(self) -> ComplexParam:
        return ComplexParam(self.a0, self.b0)

    @property
    def is_constant(self) -> bool:
        return self.a.is_constant and self.b.is_constant

    # coefficient functions -------------------------------------------------
    def c(self, t):
        return self.a(t) + 1j * self.b(t)

    def C(self, t):
        """C(t) = int_0^t c."""
        return self.a.antiderivative()(t) + 1j * self.b.antiderivative()(t)

    def C_periodic(self, t):
        """The periodic part C(t) - c0 t, zero at t = 0."""
        return self.a.antiderivative().base(t) + 1j * self.b.antiderivative().base(t)

    def translate(self, tau) -> OperatorSpec:
        return OperatorSpec(self.a.translate(tau), self.b.translate(tau), self.q)

    def gamma(self, twoM: int) -> complex:
        return 1j * (twoM / 2) * self.c0.value + self.q.value

    def osc_im_C(self) -> float:
        """Upper bound for max - min of Im of the periodic part of C."""
        return self.b.antiderivative().base.oscillation()

    def mode_operator(self, twoM, u, N=None):
        """(d_t + i m c(t) + q) u on the uniform grid, derivative taken spectrally."""
        u = np.asarray(u)
        N = N or u.shape[0]
        t = 2 * np.pi * np.arange(N) / N
        g = (1j * (twoM / 2) * self.c(t) + self.q.value).reshape((N,) + (1,) * (u.ndim - 1))
        return spectral_derivative(u) + g * u


def spectral_derivative(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    N = u.shape[0]
    k = np.fft.fftfreq(N, 1.0 / N)
    if N % 2 == 0:
        k[N // 2] = 0.0
    shape = (N,) + (1,) * (u.ndim - 1)
    return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(u, axis=0), axis=0)
