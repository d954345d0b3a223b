"""Command line front end: ``gahtorus <command> --config run.json``.

stdout carries the JSON report, stderr carries logs.  Exit codes:
0 success / GAH, 10 NotGAH, 20 Inconclusive or not confirmed, 11 resonant
modes, 12 Im c does not change sign, 13 conjugation hypothesis fails,
1 configuration or other error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .conjugation import (EulerGridFn, WignerSum, example_Q, random_band_limited,
                          time_profile, verify_zero_order_conjugation)
from .diophantine import DEFAULT_BS, adc_equivalence_check, adc_scan, resonance_set
from .engine import decide, gah_variable
from .errors import (ConfigError, GahError, HypothesisFails, InsufficientData, NotSignChanging,
                     ResonantGamma)
from .fields import SparseModalField, t_grid
from .numbers import ComplexParam
from .operators import OperatorSpec
from .singular import build_resonant_witness, build_sign_change_witness, resonant_residual
from .solver import RESONANCE_TOL, distance_to_iZ, solve_mode
from .su2 import EulerGrid, ModeIndex
from .torus import TrigPoly

log = logging.getLogger("gahtorus")

EXIT = {"ok": 0, "GAH": 0, "NotGAH": 10, "Inconclusive": 20, "resonant": 11,
        "not_sign_changing": 12, "hypothesis": 13, "error": 1}

DEFAULTS = {"twoEllMax": 64, "N": 512, "Bs": list(DEFAULT_BS)}

_scalar = {"type": ["number", "string", "object", "array"]}
_mode = {"type": "object", "required": ["twoEll", "twoM", "twoN"],
         "properties": {"twoEll": {"type": "integer", "minimum": 0},
                        "twoM": {"type": "integer"}, "twoN": {"type": "integer"}}}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "operator": {"type": "object",
                     "properties": {"a": _scalar, "b": _scalar, "q": _scalar},
                     "additionalProperties": False},
        "cutoffs": {"type": "object",
                    "properties": {"twoEllMax": {"type": "integer", "minimum": 0},
                                   "N": {"type": "integer", "minimum": 32},
                                   "kMax": {"type": "integer", "minimum": 0},
                                   "Bs": {"type": "array", "minItems": 1,
                                          "items": {"type": "number", "exclusiveMinimum": 0}}},
                    "additionalProperties": False},
        "seed": {"type": "integer"},
        "f": {"type": "object",
              "properties": {
                  "entries": {"type": "array", "items": {
                      "allOf": [_mode, {"type": "object", "required": ["profile"]}]}},
                  "families": {"type": "array", "items": {
                      "type": "object", "required": ["psi"],
                      "properties": {"psi": {"type": "object"}, "coef": _scalar,
                                     "twoEllMin": {"type": "integer", "minimum": 0}}}},
                  "random": {"type": "object",
                             "properties": {"decay": {"type": "number", "exclusiveMinimum": 0},
                                            "tdeg": {"type": "integer", "minimum": 0},
                                            "per_block": {"type": "integer", "minimum": 1}}}},
              "additionalProperties": False},
        "modes": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                             "items": {"type": "integer"}}},
        "formulation": {"enum": ["ADC", "ADC2", "ADC3", "ADC4", "all"]},
        "singular": {"type": "object",
                     "properties": {"fit_from": {"type": "integer", "minimum": 0},
                                    "order": {"type": "number"},
                                    "order_tol": {"type": "number", "exclusiveMinimum": 0}}},
        "conjugation": {"type": "object",
                        "properties": {"Q": {"type": ["object", "string"]},
                                       "q0": _scalar,
                                       "q": {"type": "object"},
                                       "grid": {"type": "array", "minItems": 4, "maxItems": 4,
                                                "items": {"type": "integer", "minimum": 1}},
                                       "u": {"type": "object"},
                                       "tolerance": {"type": "number", "exclusiveMinimum": 0}}},
        "synthesize": {"type": "object", "required": ["field"],
                       "properties": {"field": {"type": "string"},
                                      "points": {"type": "array", "items": {
                                          "type": "array", "minItems": 4, "maxItems": 4,
                                          "items": {"type": "number"}}},
                                      "grid": {"type": "array", "minItems": 3, "maxItems": 3,
                                               "items": {"type": "integer", "minimum": 1}}}},
    },
    "additionalProperties": False,
}


# --------------------------------------------------------------------------
# config handling


class Run:
    """Validated configuration plus command line overrides."""

    def __init__(self, cfg: dict, args):
        try:
            jsonschema.validate(cfg, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config: {exc.message} at {list(exc.absolute_path)}") from exc
        self.cfg = cfg
        self.cutoffs = dict(cfg.get("cutoffs", {}))
        if args.two_ell_max is not None:
            self.cutoffs["twoEllMax"] = args.two_ell_max
        if args.grid is not None:
            self.cutoffs["N"] = args.grid
        self.seed = args.seed if args.seed is not None else cfg.get("seed")
        self.out = Path(args.out) if args.out else None
        self.json_only = args.json_only
        self.spec = OperatorSpec.from_json(cfg.get("operator", {}))

    def cutoff(self, name, default=None):
        return self.cutoffs.get(name, DEFAULTS[name] if default is None else default)

    @property
    def twoEllMax(self) -> int:
        return int(self.cutoff("twoEllMax"))

    @property
    def N(self) -> int:
        return int(self.cutoff("N"))

    @property
    def Bs(self):
        return tuple(self.cutoff("Bs"))

    def rng(self) -> np.random.Generator:
        if self.seed is None:
            raise ConfigError("this command draws random data; give 'seed' or --seed")
        return np.random.default_rng(self.seed)

    def write(self, name: str, text: str):
        if self.json_only or self.out is None:
            return None
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text)
        log.info("wrote %s", path)
        return str(path)


def _complex_trig(obj, t):
    if isinstance(obj, dict) and ("re" in obj or "im" in obj):
        re = TrigPoly.from_json(obj.get("re", 0))(t)
        im = TrigPoly.from_json(obj.get("im", 0))(t)
        return re + 1j * im
    return TrigPoly.from_json(obj)(t) + 0j


def build_rhs(run: Run) -> SparseModalField:
    """The right-hand side of ``solve`` from entries, e^{-l psi} families and random data."""
    fcfg = run.cfg.get("f", {})
    N, L = run.N, run.twoEllMax
    t = t_grid(N)
    out = SparseModalField(N, L)

    def add(mode, vals):
        out.data[mode] = out.data.get(mode, 0) + vals

    for ent in fcfg.get("entries", []):
        mode = ModeIndex(ent["twoEll"], ent["twoM"], ent["twoN"])
        if mode.twoEll <= L:
            add(mode, _complex_trig(ent["profile"], t))
    for fam in fcfg.get("families", []):
        psi = _complex_trig(fam["psi"], t)
        if np.min(psi.real) <= 0:
            raise ConfigError("a family e^{-l psi} needs Re psi > 0 to be analytic")
        coef = ComplexParam.of(fam.get("coef", 1)).value
        for e in range(max(fam.get("twoEllMin", 1), 0), L + 1):
            add(ModeIndex(e, e, e), coef * np.exp(-(e / 2) * psi))
    if "random" in fcfg:
        r = fcfg["random"]
        rng = run.rng()
        decay, tdeg, per = r.get("decay", 1.0), r.get("tdeg", 3), r.get("per_block", 2)
        k = np.arange(-tdeg, tdeg + 1)
        E = np.exp(1j * np.outer(t, k))
        for e in range(L + 1):
            for _ in range(per):
                i, j = rng.integers(0, e + 1, size=2)
                mode = ModeIndex(e, -e + 2 * int(i), -e + 2 * int(j))
                a = rng.normal(size=k.size) + 1j * rng.normal(size=k.size)
                add(mode, math.exp(-decay * e / 2) * (E @ a))
    return out


def _grid_fn_from_sum(obj, spec: OperatorSpec, Nt: int, grid: EulerGrid, time_factor=False):
    ph, th, ps = grid.mesh()
    vals = np.zeros((Nt,) + ph.shape, dtype=complex)
    t = t_grid(Nt)
    for tm in obj.get("terms", []):
        ws = WignerSum.from_json({"terms": [tm]})
        prof = time_profile(spec, tm.get("t_factor", "1"))(t) if time_factor else np.ones(Nt)
        vals += prof[:, None, None, None] * ws.evaluate(ph, th, ps)[None]
    return EulerGridFn(vals, grid)


# --------------------------------------------------------------------------
# commands


def cmd_classify(run: Run):
    v = decide(run.spec, run.twoEllMax, run.Bs)
    return v.to_json(), EXIT[v.answer]


def cmd_solve(run: Run):
    f = build_rhs(run)
    u = SparseModalField(f.N, f.twoEllMax)
    resonant = sorted({(m.twoEll, m.twoM) for m, _ in f.entries()
                       if _is_resonant(run.spec, m.twoM)})
    if resonant:
        return {"error": "ResonantGamma", "modes": [list(p) for p in resonant]}, EXIT["resonant"]
    worst = 0.0
    for mode, vals in f.entries():
        sol = solve_mode(run.spec, mode.twoM, vals)
        u.data[mode] = sol
        r = run.spec.mode_operator(mode.twoM, sol) - vals
        worst = max(worst, float(np.max(np.abs(r))))
    report = {"N": f.N, "twoEllMax": f.twoEllMax, "entries": len(f.data),
              "max_mode_residual": worst}
    if len(f.data):
        try:
            report["decayF"] = f.fit_decay().to_json()
            report["decayU"] = u.fit_decay().to_json()
        except GahError as exc:
            report["decay"] = f"not fitted: {exc}"
    else:
        report["decayU"] = {"model": "Zero", "params": {}}
    report["files"] = {"u": run.write("u_field.csv", u.dumps()),
                       "f": run.write("f_field.csv", f.dumps())}
    return report, EXIT["ok"]


def _is_resonant(spec, twoM):
    return distance_to_iZ(spec.gamma(twoM)) <= RESONANCE_TOL


def cmd_singular(run: Run):
    sc = run.cfg.get("singular", {})
    L, N = int(run.cutoff("twoEllMax", 256)), int(run.cutoff("N", 1024))
    sd = build_sign_change_witness(run.spec, L, N, sc.get("fit_from", 16))
    target, tol = sc.get("order", -0.5), sc.get("order_tol", 0.05)
    order = sd.decayU.params.get("order")
    confirmed = (sd.decayU.model == "Polynomial" and order is not None
                 and abs(order - target) <= tol)
    summary = sd.summary()
    summary["confirmed"] = bool(confirmed)
    summary["files"] = {"csv": run.write("singular.csv", sd.csv())}
    if not run.json_only and run.out is not None:
        summary["files"]["u"] = run.write("u_field.csv", sd.uField.dumps())
        summary["files"]["f"] = run.write("f_field.csv", sd.fField.dumps())
    return summary, EXIT["ok"] if confirmed else EXIT["Inconclusive"]


def cmd_resonant_witness(run: Run):
    modes = run.cfg.get("modes")
    if not modes:
        rs = resonance_set(run.spec.c0, run.spec.q)
        if rs.status != "Infinite":
            return {"error": "NotResonant", "message": "the resonant set is empty"}, EXIT["error"]
        modes = [list(rs.witness)]
    fld = build_resonant_witness(run.spec, [tuple(m) for m in modes], run.twoEllMax, run.N)
    # |u^(t_j, l)| = 1 for every l is the non-decay claim; the fit is a summary
    peak_min = min(abs(v) for _, v in fld.meta.values())
    try:
        decay = fld.fit_decay().to_json()
    except InsufficientData as exc:
        decay = f"not fitted: {exc}"
    report = {"modes": modes, "entries": len(fld.data), "sup": fld.sup_norm(),
              "peaks": [{"twoEll": m.twoEll, "twoM": m.twoM, "t": tj, "value": [v.real, v.imag]}
                        for m, (tj, v) in list(fld.meta.items())[:8]],
              "max_mode_residual": resonant_residual(run.spec, fld),
              "decay": decay, "min_peak": peak_min,
              "non_decaying": bool(abs(peak_min - 1) < 1e-12)}
    report["files"] = {"u": run.write("u_field.csv", fld.dumps())}
    return report, EXIT["ok"]


def cmd_adc_scan(run: Run):
    form = run.cfg.get("formulation", "all")
    c0, q = run.spec.c0, run.spec.q
    if form == "all":
        return adc_equivalence_check(c0, q, run.twoEllMax, run.Bs, raise_on_failure=False), 0
    return adc_scan(c0, q, form, run.twoEllMax, run.Bs).to_json(), EXIT["ok"]


def cmd_conjugation_check(run: Run):
    cc = run.cfg.get("conjugation", {})
    Nt, nphi, nth, npsi = cc.get("grid", [64, 16, 16, 64])
    grid = EulerGrid(nphi, nth, npsi)
    spec = run.spec
    q0 = ComplexParam.of(cc.get("q0", 0)).value
    Qc = cc.get("Q", "example")
    if Qc == "example":
        Q = example_Q(Nt, grid)
    elif isinstance(Qc, dict):
        Q = _grid_fn_from_sum(Qc, spec, Nt, grid)
    else:
        raise ConfigError(f"unknown Q {Qc!r}")
    qc = cc.get("q", {"constant": cc.get("q0", 0)})
    qfun = _grid_fn_from_sum(qc, spec, Nt, grid, time_factor=True)
    qfun.values += ComplexParam.of(qc.get("constant", 0)).value
    ucfg = cc.get("u", {})
    seed = run.seed if run.seed is not None else 0
    u = random_band_limited(np.random.default_rng(seed), Nt, grid,
                            ucfg.get("twoEllMax", 2), ucfg.get("tdeg", 3))
    tol = cc.get("tolerance", 1e-6)
    try:
        res = verify_zero_order_conjugation(spec, Q, q0, u, qfun)
    except HypothesisFails as exc:
        return {"error": "HypothesisFails", "hypothesis_residual": exc.residual}, EXIT["hypothesis"]
    p00 = OperatorSpec(spec.a, spec.b, ComplexParam.of(cc.get("q0", 0)))
    v00 = gah_variable(p00, run.twoEllMax, run.Bs)
    report = {"residual": res, "tolerance": tol, "grid": [Nt, nphi, nth, npsi], "seed": seed,
              "P00": v00.to_json(), "P": v00.answer if res < tol else None}
    return report, EXIT["ok"] if res < tol else EXIT["Inconclusive"]


def cmd_synthesize(run: Run):
    sc = run.cfg["synthesize"]
    text = Path(sc["field"]).read_text()
    fld = SparseModalField.loads(text).to_modal_field()
    report = {"N": fld.N, "twoEllMax": fld.twoEllMax}
    if "points" in sc:
        vals = fld.synthesize(np.array(sc["points"], dtype=float))
        report["values"] = [[float(z.real), float(z.imag)] for z in np.atleast_1d(vals)]
    if "grid" in sc:
        grid = EulerGrid(*sc["grid"])
        vals = fld.to_grid(grid)
        report["grid"] = {"shape": list(vals.shape),
                          "file": run.write("grid.txt", EulerGridFn(vals, grid).dumps())}
    return report, EXIT["ok"]


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "singular": cmd_singular,
    "resonant-witness": cmd_resonant_witness,
    "adc-scan": cmd_adc_scan,
    "conjugation-check": cmd_conjugation_check,
    "synthesize": cmd_synthesize,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gahtorus", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="directory for field and CSV files")
    ap.add_argument("--two-ell-max", type=int, dest="two_ell_max")
    ap.add_argument("--grid", type=int, help="t-grid size N (power of two >= 32)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--json-only", action="store_true", dest="json_only",
                    help="print the report and write no files")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        cfg = json.loads(Path(args.config).read_text())
        run = Run(cfg, args)
        report, code = COMMANDS[args.command](run)
    except ResonantGamma as exc:
        report, code = {"error": "ResonantGamma", "message": str(exc),
                        "modes": [list(m) if isinstance(m, tuple) else m for m in exc.modes]}, 11
    except NotSignChanging as exc:
        report, code = {"error": "NotSignChanging", "message": str(exc)}, 12
    except HypothesisFails as exc:
        report, code = {"error": "HypothesisFails", "hypothesis_residual": exc.residual}, 13
    except (GahError, OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT["error"]
    print(json.dumps(report, sort_keys=True, indent=2, default=_default))
    return code


if __name__ == "__main__":
    sys.exit(main())
