"""Periodic solutions of the mode equations  v' + gamma v = g  and
u' + (i m c(t) + q) u = f  on the uniform grid t_j = 2 pi j / N.

Every integral is a product-integration rule: the data are replaced by their
trigonometric interpolant and the kernel is integrated exactly against it.
This keeps spectral accuracy even though the kernels e^{-gamma s} are not
periodic in s, where the plain trapezoid rule would only be second order.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, IncompatibleData, NotResonant, ResonantGamma
from .fields import ModalField
from .operators import OperatorSpec, spectral_derivative

RESONANCE_TOL = 1e-13
CONJUGATION_MAX_EXPONENT = 8.0
PANEL_NODES = 16


def check_grid(N: int):
    if N < 32 or N & (N - 1):
        raise ConfigError(f"grid size N={N} must be a power of two >= 32")


def _freqs(N):
    return np.fft.fftfreq(N, 1.0 / N)


def distance_to_iZ(gamma: complex) -> float:
    return math.hypot(gamma.real, gamma.imag - round(gamma.imag))


def _multipliers(gamma: complex, N: int, sign: int) -> np.ndarray:
    """Per-frequency integrals (1/N) * kernel transform, with the Nyquist mode split."""
    k = _freqs(N)
    mu = 1.0 / (gamma + sign * 1j * k)
    if N % 2 == 0:
        K = N // 2
        mu[K] = 0.5 * (1.0 / (gamma + 1j * K) + 1.0 / (gamma - 1j * K))
    return mu


def product_weights(gamma: complex, N: int, branch: str) -> np.ndarray:
    """Weights W with  v(t_j) = sum_i W_i g(t_j -+ s_i).

    ``branch="minus"``:  v(t) = (1 - e^{-2pi gamma})^{-1} int_0^{2pi} e^{-gamma s} g(t - s) ds
    ``branch="plus"``:   v(t) = (e^{2pi gamma} - 1)^{-1}  int_0^{2pi} e^{gamma r} g(t + r) dr

    Integrating e^{-+gamma s} against the cardinal functions of the grid gives
    W_i = (1/N) sum_k e^{-i k s_i} / (gamma -+ i k); the normalising prefactor
    cancels exactly.
    """
    if branch == "minus":
        mu = _multipliers(gamma, N, -1)
    elif branch == "plus":
        mu = _multipliers(gamma, N, +1)
    else:
        raise ValueError(branch)
    return np.fft.fft(mu) / N


def choose_branch(gamma: complex) -> str:
    """The branch whose kernel |e^{-+gamma s}| stays <= 1 on [0, 2pi]."""
    return "minus" if gamma.real >= 0 else "plus"


def solve_constant(gamma: complex, g, branch: str | None = None) -> np.ndarray:
    """Unique periodic solution of v' + gamma v = g (gamma not in iZ)."""
    g = np.asarray(g, dtype=complex)
    N = g.shape[0]
    check_grid(N)
    gamma = complex(gamma)
    if distance_to_iZ(gamma) <= RESONANCE_TOL:
        raise ResonantGamma(f"gamma={gamma} lies in iZ; use solve_resonant")
    branch = branch or choose_branch(gamma)
    W = product_weights(gamma, N, branch)
    shape = (N,) + (1,) * (g.ndim - 1)
    Wf = np.fft.fft(W).reshape(shape)
    G = np.fft.fft(g, axis=0)
    if branch == "minus":
        # circular convolution sum_i W_i g_{j-i}
        return np.fft.ifft(Wf * G, axis=0)
    # circular correlation sum_i W_i g_{j+i}
    Wc = np.fft.fft(np.roll(W[::-1], 1)).reshape(shape)
    return np.fft.ifft(Wc * G, axis=0)


def solve_constant_direct(gamma: complex, g, branch: str) -> np.ndarray:
    """O(N^2) evaluation of the same quadrature, kept for cross-checking."""
    g = np.asarray(g, dtype=complex)
    N = g.shape[0]
    W = product_weights(complex(gamma), N, branch)
    j = np.arange(N)
    idx = (j[:, None] - j[None, :]) % N if branch == "minus" else (j[:, None] + j[None, :]) % N
    return (W[None, :] * g[idx]).sum(axis=1)


def solve_resonant(gamma: complex, g, tol=1e-10) -> np.ndarray:
    """A periodic solution of v' + gamma v = g for gamma = i j, normalised by v(0) = 0."""
    g = np.asarray(g, dtype=complex)
    N = g.shape[0]
    check_grid(N)
    gamma = complex(gamma)
    if distance_to_iZ(gamma) > RESONANCE_TOL:
        raise NotResonant(f"gamma={gamma} is not in iZ")
    j = int(round(gamma.imag))
    t = 2 * np.pi * np.arange(N) / N
    h = np.exp(1j * j * t) * g
    H = np.fft.fft(h) / N
    compat = 2 * np.pi * abs(H[0])
    gmax = float(np.max(np.abs(g))) if N else 0.0
    if compat > tol * max(gmax, 1e-300):
        raise IncompatibleData(f"compatibility integral {compat:.3e} is not zero")
    k = _freqs(N)
    if N % 2 == 0:
        H[N // 2] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        A = np.where(k != 0, H / (1j * k), 0.0)
    Ht = np.fft.ifft(A) * N
    Ht = Ht - Ht[0]
    return np.exp(-1j * j * t) * Ht


# --------------------------------------------------------------------------
# variable coefficients


def _conjugation_factor(spec: OperatorSpec, twoM: int, t):
    return np.exp(1j * (twoM / 2) * spec.C_periodic(t))


def solve_mode(spec: OperatorSpec, twoM: int, fhat, method: str | None = None) -> np.ndarray:
    """Periodic solution of u' + (i m c(t) + q) u = f on the grid."""
    fhat = np.asarray(fhat, dtype=complex)
    N = fhat.shape[0]
    check_grid(N)
    gam = spec.gamma(twoM)
    if distance_to_iZ(gam) <= RESONANCE_TOL:
        raise ResonantGamma(f"gamma_m={gam} lies in iZ for twoM={twoM}", [twoM])
    if spec.is_constant:
        return solve_constant(gam, fhat)
    if method is None:
        expo = abs(twoM / 2) * spec.osc_im_C()
        method = "conjugate" if expo <= CONJUGATION_MAX_EXPONENT else "panel"
    t = 2 * np.pi * np.arange(N) / N
    if method == "conjugate":
        E = _conjugation_factor(spec, twoM, t)
        shape = (N,) + (1,) * (fhat.ndim - 1)
        E = E.reshape(shape)
        return solve_constant(gam, E * fhat) / E
    if method == "panel":
        if fhat.ndim == 1:
            return _solve_panel(spec, twoM, fhat)
        flat = fhat.reshape(N, -1)
        out = np.stack([_solve_panel(spec, twoM, flat[:, i]) for i in range(flat.shape[1])], axis=1)
        return out.reshape(fhat.shape)
    raise ValueError(method)


def _phase(spec: OperatorSpec, twoM: int, t):
    """Phi(t) = int_0^t (i m c + q) = i m C(t) + q t."""
    return 1j * (twoM / 2) * spec.C(t) + spec.q.value * np.asarray(t, dtype=float)


def _solve_panel(spec: OperatorSpec, twoM: int, f: np.ndarray) -> np.ndarray:
    """Quadrature of the periodic solution formula panel by panel.

    With Phi as in :func:`_phase` and I_i = int over panel i of
    e^{-(Phi(t_{i+1}) - Phi(s))} f(s) ds (Gauss-Legendre on the interpolant of f),

        u(t_j) = (1 - e^{-2pi gamma})^{-1} [ sum_{i<j}  e^{-(Phi_j - Phi_{i+1})} I_i
                                            + sum_{i>=j} e^{-(Phi_j + 2pi gamma - Phi_{i+1})} I_i ].

    Each term is formed from the exponent difference directly, so no
    propagator is accumulated and nothing overflows unless the solution does.
    """
    N = f.shape[0]
    h = 2 * np.pi / N
    t = h * np.arange(N + 1)
    x, w = np.polynomial.legendre.leggauss(PANEL_NODES)
    off = 0.5 * h * (x + 1.0)
    gam = spec.gamma(twoM)
    Phi = _phase(spec, twoM, t)
    I = np.zeros(N, dtype=complex)
    F = np.fft.fft(f)
    k = _freqs(N)
    if N % 2 == 0:
        k_ny = N // 2
    for g, d in enumerate(off):
        ph = np.exp(1j * k * d)
        if N % 2 == 0:
            ph[k_ny] = math.cos(k_ny * d)
        fs = np.fft.ifft(F * ph)  # f(t_i + d)
        s = t[:-1] + d
        I += 0.5 * h * w[g] * np.exp(-(Phi[1:] - _phase(spec, twoM, s))) * fs
    j = np.arange(N)
    D = Phi[:N, None] - Phi[None, 1:]  # Phi_j - Phi_{i+1}
    D = np.where(j[None, :] >= j[:, None], D + 2 * np.pi * gam, D)
    u = (np.exp(-D) @ I) / (1.0 - np.exp(-2 * np.pi * gam))
    return u


def mode_residual(spec: OperatorSpec, twoM: int, u, f) -> float:
    """max |u' + (i m c + q) u - f| / max |f| with the derivative taken spectrally."""
    r = spec.mode_operator(twoM, u) - np.asarray(f)
    fm = float(np.max(np.abs(f)))
    return float(np.max(np.abs(r))) / (fm if fm > 0 else 1.0)


def solve_field(spec: OperatorSpec, f: ModalField) -> ModalField:
    """Apply :func:`solve_mode` to every block; the row index carries m."""
    resonant = []
    for e in f.coeffs:
        for i in range(e + 1):
            twoM = -e + 2 * i
            if distance_to_iZ(spec.gamma(twoM)) <= RESONANCE_TOL:
                resonant.append((e, twoM))
    if resonant:
        raise ResonantGamma(f"{len(resonant)} resonant (twoEll, twoM) pairs", resonant)
    out = ModalField(f.N, f.twoEllMax, {})
    for e, A in f.coeffs.items():
        U = np.zeros_like(A)
        for i in range(e + 1):
            U[:, i, :] = solve_mode(spec, -e + 2 * i, A[:, i, :])
        out.coeffs[e] = U
    return out


def field_residual(spec: OperatorSpec, u: ModalField, f: ModalField) -> float:
    worst = 0.0
    for e, A in u.coeffs.items():
        for i in range(e + 1):
            twoM = -e + 2 * i
            r = spec.mode_operator(twoM, A[:, i, :]) - f.coeffs[e][:, i, :]
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


def spectral_residual(gamma, v, g) -> float:
    r = spectral_derivative(v) + gamma * np.asarray(v) - np.asarray(g)
    return float(np.max(np.abs(r)))
