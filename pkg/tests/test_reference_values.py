"""Small reference values for individual operations."""

import math

import numpy as np
import pytest

from gahtorus import OperatorSpec, check_c1_c2
from gahtorus.conjugation import EulerGridFn, apply_P_euler
from gahtorus.diophantine import adc_scan, resonance_set
from gahtorus.fields import t_grid
from gahtorus.solver import solve_constant, solve_mode, solve_resonant
from gahtorus.su2 import (EulerGrid, analyze, fit_decay_sequence, neutral_symbol, plancherel_norm,
                          wigner_matrix)
from gahtorus.torus import TrigPoly, max_on_period
from oracles import rk4_periodic_variable

t = t_grid(64)


def test_constant_solutions():
    assert np.allclose(solve_constant(1.0, np.full(64, 3.0 + 0j)), 3.0, atol=1e-14)
    assert np.abs(solve_constant(1.0, np.exp(1j * t)) - np.exp(1j * t) / (1 + 1j)).max() < 1e-14


def test_resonant_solutions():
    assert np.abs(solve_resonant(0, np.sin(t)) - (1 - np.cos(t))).max() < 1e-13


def test_variable_mode_against_rk4():
    spec = OperatorSpec.make(a=0, b={"mean": 2, "sin": [1]}, q="3/10")
    u = solve_mode(spec, 2, np.exp(1j * t))
    ref = rk4_periodic_variable(lambda s: 1j * spec.c(s) + 0.3, lambda s: np.exp(1j * s))
    assert np.abs(u - ref).max() < 1e-7


def test_constant_c_mode_reduces_to_constant_solver():
    spec = OperatorSpec.make(a="1/3", b=1, q="1/5")
    g = np.cos(3 * t) + 1j * np.sin(t)
    assert np.abs(solve_mode(spec, 3, g) - solve_constant(spec.gamma(3), g)).max() < 1e-13
    assert np.abs(solve_mode(spec, 3, np.zeros(64, complex))).max() == 0.0


def test_neutral_symbols():
    assert np.allclose(np.diag(neutral_symbol(1)), [-0.5j, 0.5j])
    assert np.allclose(np.diag(neutral_symbol(4)), [-2j, -1j, 0, 1j, 2j])
    assert np.allclose(neutral_symbol(0), 0)


def test_half_spin_entry_norm():
    g = EulerGrid.for_band(2)
    ph, th, ps = g.mesh()
    co = analyze(wigner_matrix(1, (ph, th, ps))[..., 1, 1], g, 1)
    assert abs(plancherel_norm(co) ** 2 - 0.5) < 1e-13
    assert plancherel_norm({0: np.array([[3.0]])}) == 3.0


def test_growth_fit():
    ells = np.arange(1, 40) / 2
    r = fit_decay_sequence(ells, (1 + ells) ** 3)
    assert r.model == "Growth" and abs(r.params["K"] - 3) < 0.06


def test_max_of_sin2t_antiderivative():
    M, ts = max_on_period(TrigPoly.from_json({"sin": [0, 1]}).antiderivative())
    assert abs(M - 1) < 1e-12 and abs(ts - math.pi / 2) < 1e-9


def test_conditions_and_resonance():
    assert check_c1_c2(0, 1).kind == "C2"
    assert resonance_set(0, 1).status == "Empty"
    r = adc_scan(0, 1, "ADC", 16)
    assert r.verdict == "NoViolationUpToCutoff" and abs(r.min_abs["value"] - 1) < 1e-15


def test_euler_operator_kills_psi_independent_stationary_u():
    g = EulerGrid(4, 3, 8)
    u = EulerGridFn.from_function(lambda tt, ph, th, ps: np.cos(th) + np.sin(ph) + 0 * tt, 8, g)
    spec = OperatorSpec.make(a=1, b={"mean": 2, "sin": [1]}, q=0)
    assert np.abs(apply_P_euler(spec, 0, u)).max() < 1e-13
