"""Sign-change normalisation, the phases and the singular solutions."""

import math

import numpy as np
import pytest

from gahtorus import OperatorSpec
from gahtorus.errors import NotResonant, NotSignChanging, ResonantGamma
from gahtorus.singular import (PHI_TOL, Phases, build_resonant_witness, build_sign_change_witness,
                               choose_K, maximum_of_B, normalize_sign_change, phase_checks,
                               resolve_panels, resonant_profile, resonant_residual, u_hat)

SIN = OperatorSpec.make(a=0, b={"sin": [1]}, q="3/10")


def phases(spec):
    nspec, _ = normalize_sign_change(spec)
    M, ts = maximum_of_B(nspec)
    return Phases(nspec, M, ts, choose_K(nspec))


class TestNormalize:
    @pytest.mark.parametrize("b, sign, shift", [
        ({"sin": [1]}, 1, 0.0),
        ({"sin": [-1]}, 1, math.pi),
        ({"sin": [math.cos(1)], "cos": [-math.sin(1)]}, 1, 1.0),
        ({"mean": "3/10", "sin": [1]}, -1, None),
    ])
    def test_transform(self, b, sign, shift):
        nspec, tr = normalize_sign_change(OperatorSpec.make(a=0, b=b, q="3/10"))
        assert tr.sign == sign
        if shift is not None:
            assert abs(tr.shift - shift) < 1e-10
        assert abs(nspec.b(0.0)) < 1e-12
        assert nspec.b(-1e-4) < 0 < nspec.b(1e-4)
        assert nspec.b0.value <= 0

    def test_transform_maps_back(self):
        spec = OperatorSpec.make(a={"mean": 1, "cos": [0.5]}, b={"mean": "1/5", "sin": [1]}, q=0)
        nspec, tr = normalize_sign_change(spec)
        t = np.linspace(0, 6, 13)
        assert np.allclose(nspec.b(t), tr.sign * spec.b(tr.to_original_time(t)))
        assert np.allclose(nspec.a(t), tr.sign * spec.a(tr.to_original_time(t)))
        assert tr.to_original_twoM(3) == -3

    def test_not_sign_changing(self):
        with pytest.raises(NotSignChanging):
            normalize_sign_change(OperatorSpec.make(a=0, b={"mean": 2, "sin": [1]}, q=0))


class TestPhases:
    def test_sin_constants(self):
        ph = phases(SIN)
        assert abs(ph.M - 2) < 1e-12 and abs(ph.tStar - math.pi) < 1e-10 and ph.K == 2

    def test_higher_harmonic_needs_larger_K(self):
        assert choose_K(OperatorSpec.make(a=0, b={"sin": [0, 1]}, q=0)) == 3

    @pytest.mark.parametrize("op", [
        {"a": 0, "b": {"sin": [1]}, "q": "3/10"},
        {"a": {"mean": 1, "cos": [0.5]}, "b": {"mean": "-1/5", "sin": [1]}, "q": 0},
        {"a": 0.7, "b": {"sin": [1, 0.3], "cos": [0, 0.2]}, "q": [0, "1/2"]},
    ])
    def test_checks(self, op):
        ch = phase_checks(phases(OperatorSpec.make(**op)))
        assert ch["phi_grid_max"] <= PHI_TOL
        assert ch["corner_error"] < 1e-12
        assert ch["phi_hol_0"] < 1e-14 and ch["phi_hol_1"] < 1e-8
        assert ch["phi_hol_2_error"] < 1e-6
        assert ch["Phi_tstar_tstar"] < 1e-12
        assert ch["tstar_min_RePhi"] >= ch["tstar_margin"] > 0


class TestQuadrature:
    def test_matches_adaptive_quadrature(self):
        from scipy.integrate import quad
        ph = phases(SIN)
        p, _ = resolve_panels(ph, 32)
        q = ph.spec.q.value
        for t in (0.5, math.pi, 4.0):
            f = lambda s: np.exp(-q * s - 8 * ph.Phi(t, s))
            ref = (quad(lambda s: f(s).real, 0, 2 * math.pi, limit=400, epsabs=1e-14)[0]
                   + 1j * quad(lambda s: f(s).imag, 0, 2 * math.pi, limit=400, epsabs=1e-14)[0])
            assert abs(u_hat(ph, [t], [16], p)[0, 0] - ref) < 1e-10


@pytest.fixture(scope="module")
def data():
    return build_sign_change_witness(SIN, twoEllMax=64, N=256)


class TestSignChangeWitness:
    def test_equation(self, data):
        assert data.max_residual < 1e-9

    def test_f_analytic(self, data):
        assert data.decayF.model == "Exponential" and data.decayF.params["B"] > 0

    def test_u_bounded(self, data):
        s = data.summary()
        assert s["u_sup"] <= s["u_bound"]

    def test_u_decays_like_inverse_sqrt(self, data):
        assert data.decayU.model == "Polynomial"
        assert abs(data.decayU.params["order"] + 0.5) < 0.1

    def test_csv(self, data):
        lines = data.csv().splitlines()
        assert lines[0] == "twoEll,|f_hat_at_tmin|,|u_hat_at_tstar|" and len(lines) == 65

    def test_diagonal_resonance_rejected(self):
        with pytest.raises(ResonantGamma):
            build_sign_change_witness(OperatorSpec.make(a=0, b={"sin": [1]}, q=[0, 1]), 8, 64)


class TestResonantWitness:
    spec = OperatorSpec.make(a=0, b=1, q="1/2")

    def test_profile(self):
        tj, _, prof = resonant_profile(self.spec, 1)
        t = np.linspace(0, 2 * math.pi, 101)
        assert np.abs(prof(t)).max() <= 1 + 1e-14 and abs(prof(tj) - 1) < 1e-15

    def test_variable_coefficients(self):
        spec = OperatorSpec.make(a={"cos": [1]}, b={"mean": 1, "sin": [0.5]}, q="1/2")
        fld = build_resonant_witness(spec, [(0, 1)], twoEllMax=9, N=256)
        assert resonant_residual(spec, fld) < 1e-9
        assert len(fld.data) == 5
        for mode, (tj, val) in fld.meta.items():
            assert abs(abs(val) - 1) < 1e-14
            assert np.abs(fld.data[mode]).max() <= 1 + 1e-9

    def test_not_resonant(self):
        with pytest.raises(NotResonant):
            resonant_profile(self.spec, 2)
