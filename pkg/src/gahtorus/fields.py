"""Families of periodic grid functions indexed by representation modes."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ModeOutOfRange
from .su2 import (DecayReport, EulerGrid, ModeIndex, analyze, fit_decay_sequence,
                  synthesize_grid, synthesize_points)


def t_grid(N: int) -> np.ndarray:
    return 2 * np.pi * np.arange(N) / N


def fourier_interp(samples: np.ndarray, t) -> np.ndarray:
    """Trigonometric interpolation along axis 0 of uniformly sampled data."""
    samples = np.asarray(samples)
    N = samples.shape[0]
    F = np.fft.fft(samples, axis=0) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    E = np.exp(1j * np.outer(t, k))
    if N % 2 == 0:
        # split the Nyquist mode symmetrically so real data stays real
        E[:, N // 2] = np.cos(N // 2 * t)
    return np.tensordot(E, F, axes=(1, 0))


@dataclass
class ModalField:
    """Mode coefficients ``u^(t_j, ell)_{mn}`` on a uniform t-grid.

    ``coeffs[twoEll]`` is an array of shape (N, 2l+1, 2l+1) indexed
    [t_j, row m, col n].  Missing twoEll blocks are zero.
    """

    N: int
    twoEllMax: int
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, N, twoEllMax, twoEllMin=0) -> ModalField:
        return cls(N, twoEllMax, {e: np.zeros((N, e + 1, e + 1), dtype=complex)
                                  for e in range(twoEllMin, twoEllMax + 1)})

    @property
    def t(self):
        return t_grid(self.N)

    def _check(self, mode: ModeIndex):
        if mode.twoEll > self.twoEllMax:
            raise ModeOutOfRange(f"mode {mode} exceeds twoEllMax={self.twoEllMax}")

    def block(self, twoEll) -> np.ndarray:
        if twoEll not in self.coeffs:
            if twoEll > self.twoEllMax or twoEll < 0:
                raise ModeOutOfRange(f"twoEll={twoEll} out of range")
            self.coeffs[twoEll] = np.zeros((self.N, twoEll + 1, twoEll + 1), dtype=complex)
        return self.coeffs[twoEll]

    def entry(self, mode: ModeIndex) -> np.ndarray:
        self._check(mode)
        return self.block(mode.twoEll)[:, mode.row, mode.col]

    def set_entry(self, mode: ModeIndex, values):
        self._check(mode)
        self.block(mode.twoEll)[:, mode.row, mode.col] = values

    def entries(self):
        for e in sorted(self.coeffs):
            A = self.coeffs[e]
            for i in range(e + 1):
                for j in range(e + 1):
                    yield ModeIndex(e, -e + 2 * i, -e + 2 * j), A[:, i, j]

    def copy(self) -> ModalField:
        return ModalField(self.N, self.twoEllMax, {e: A.copy() for e, A in self.coeffs.items()})

    def max_abs_diff(self, other: ModalField) -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        out = 0.0
        for e in keys:
            a = self.coeffs.get(e, 0.0)
            b = other.coeffs.get(e, 0.0)
            out = max(out, float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0)))
        return out

    # evaluation ---------------------------------------------------------
    def coeffs_at(self, t) -> dict:
        """Coefficient matrices at arbitrary times (trigonometric interpolation)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = {}
        for e, A in self.coeffs.items():
            idx = np.rint(t * self.N / (2 * np.pi))
            on_grid = np.abs(t - 2 * np.pi * idx / self.N) < 1e-12
            if np.all(on_grid):
                out[e] = A[idx.astype(int) % self.N]
            else:
                out[e] = fourier_interp(A, t)
        return out

    def synthesize(self, points) -> np.ndarray:
        """Values of the truncated series at points (t, phi, theta, psi)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cs = self.coeffs_at(pts[:, 0])
        return synthesize_points(cs, (pts[:, 1], pts[:, 2], pts[:, 3]))

    def to_grid(self, grid: EulerGrid) -> np.ndarray:
        """Samples on the (t_j, phi, theta, psi) product mesh."""
        return synthesize_grid(self.coeffs, grid)

    @classmethod
    def from_grid(cls, values, grid: EulerGrid, twoEllMax: int) -> ModalField:
        values = np.asarray(values)
        return cls(values.shape[0], twoEllMax, analyze(values, grid, twoEllMax))

    # decay --------------------------------------------------------------
    def magnitude_by_ell(self, t_index=None, twoEllMin=0):
        """``(ells, max |entry|)`` at one grid time, or sup over t when None."""
        ells, mags = [], []
        for e in sorted(self.coeffs):
            if e < twoEllMin:
                continue
            A = np.abs(self.coeffs[e])
            val = A.max() if t_index is None else A[t_index].max()
            ells.append(e / 2)
            mags.append(float(val))
        return np.array(ells), np.array(mags)

    def fit_decay(self, t_index=None, twoEllMin=0) -> DecayReport:
        return fit_decay_sequence(*self.magnitude_by_ell(t_index, twoEllMin))

    # serialization ------------------------------------------------------
    def dumps(self) -> str:
        """JSON header line followed by CSV rows ``twoEll,twoM,twoN,re0,im0,...``."""
        buf = io.StringIO()
        buf.write(json.dumps({"N": self.N, "twoEllMax": self.twoEllMax}) + "\n")
        for mode, vec in self.entries():
            if not np.any(vec):
                continue
            parts = [str(mode.twoEll), str(mode.twoM), str(mode.twoN)]
            for z in vec:
                parts.append(repr(float(z.real)))
                parts.append(repr(float(z.imag)))
            buf.write(",".join(parts) + "\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> ModalField:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ConfigError("empty ModalField file")
        head = json.loads(lines[0])
        fld = cls.zeros(int(head["N"]), int(head["twoEllMax"]))
        for ln in lines[1:]:
            parts = ln.split(",")
            mode = ModeIndex(int(parts[0]), int(parts[1]), int(parts[2]))
            nums = np.array([float(x) for x in parts[3:]])
            if len(nums) != 2 * fld.N:
                raise ConfigError(f"row for {mode} has {len(nums) // 2} samples, expected {fld.N}")
            fld.set_entry(mode, nums[0::2] + 1j * nums[1::2])
        return fld


def dump_euler_grid(values: np.ndarray, grid: EulerGrid, tN: int) -> str:
    """EulerGridFn text: JSON header then ``re,im`` rows in (t, phi, theta, psi) C-order."""
    head = {"Nt": tN, "Nphi": grid.nphi, "Ntheta": grid.ntheta, "Npsi": grid.npsi,
            "order": "t,phi,theta,psi", "theta_nodes": "gauss-legendre"}
    flat = np.asarray(values).reshape(-1)
    rows = "\n".join(f"{z.real!r},{z.imag!r}" for z in flat.tolist())
    return json.dumps(head) + "\n" + rows + "\n"


def load_euler_grid(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = json.loads(lines[0])
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    shape = (head["Nt"], head["Nphi"], head["Ntheta"], head["Npsi"])
    vals = (data[:, 0] + 1j * data[:, 1]).reshape(shape)
    return vals, EulerGrid(head["Nphi"], head["Ntheta"], head["Npsi"])


@dataclass
class SparseModalField:
    """A mode family with few nonzero entries per block, such as the diagonal
    families used for singular solutions.  Same text format as ModalField."""

    N: int
    twoEllMax: int
    data: dict = field(default_factory=dict)  # ModeIndex -> (N,) complex
    meta: dict = field(default_factory=dict)

    def entry(self, mode: ModeIndex) -> np.ndarray:
        if mode.twoEll > self.twoEllMax:
            raise ModeOutOfRange(f"mode {mode} exceeds twoEllMax={self.twoEllMax}")
        return self.data.get(mode, np.zeros(self.N, dtype=complex))

    def set_entry(self, mode: ModeIndex, values):
        if mode.twoEll > self.twoEllMax:
            raise ModeOutOfRange(f"mode {mode} exceeds twoEllMax={self.twoEllMax}")
        self.data[mode] = np.asarray(values, dtype=complex).copy()

    def entries(self):
        for mode in sorted(self.data, key=lambda m: (m.twoEll, m.twoM, m.twoN)):
            yield mode, self.data[mode]

    @property
    def t(self):
        return t_grid(self.N)

    def sup_norm(self) -> float:
        return max((float(np.max(np.abs(v))) for v in self.data.values()), default=0.0)

    def magnitude_by_ell(self, t_index=None, twoEllMin=0):
        best: dict = {}
        for mode, v in self.data.items():
            if mode.twoEll < twoEllMin:
                continue
            a = np.abs(v)
            val = float(a.max() if t_index is None else a[t_index])
            best[mode.twoEll] = max(best.get(mode.twoEll, 0.0), val)
        keys = sorted(best)
        return np.array([e / 2 for e in keys]), np.array([best[e] for e in keys])

    def fit_decay(self, t_index=None, twoEllMin=0) -> DecayReport:
        return fit_decay_sequence(*self.magnitude_by_ell(t_index, twoEllMin))

    def to_modal_field(self) -> ModalField:
        out = ModalField.zeros(self.N, self.twoEllMax)
        for mode, v in self.data.items():
            out.set_entry(mode, v)
        return out

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write(json.dumps({"N": self.N, "twoEllMax": self.twoEllMax}) + "\n")
        for mode, vec in self.entries():
            parts = [str(mode.twoEll), str(mode.twoM), str(mode.twoN)]
            for z in vec:
                parts.append(repr(float(z.real)))
                parts.append(repr(float(z.imag)))
            buf.write(",".join(parts) + "\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> SparseModalField:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ConfigError("empty field file")
        head = json.loads(lines[0])
        out = cls(int(head["N"]), int(head["twoEllMax"]))
        for ln in lines[1:]:
            parts = ln.split(",")
            mode = ModeIndex(int(parts[0]), int(parts[1]), int(parts[2]))
            nums = np.array([float(x) for x in parts[3:]])
            out.data[mode] = nums[0::2] + 1j * nums[1::2]
        return out
