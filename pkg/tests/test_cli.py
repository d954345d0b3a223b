"""Command line behaviour: exit codes, reports and written files."""

import json
from pathlib import Path

import pytest

from gahtorus.cli import main
from gahtorus.fields import SparseModalField
from test_engine import snapshot

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

CASES = [
    ("classify", "classify_averaged", 0),
    ("classify", "classify_sign_change", 10),
    ("classify", "classify_float_scan", 20),
    ("classify", "classify_tower", 10),
    ("classify", "bad_schema", 1),
    ("solve", "solve_random", 0),
    ("solve", "solve_resonant", 11),
    ("singular", "singular_sin", 0),
    ("singular", "singular_no_sign_change", 12),
    ("resonant-witness", "resonant_witness", 0),
    ("adc-scan", "adc_scan_all", 0),
    ("conjugation-check", "conjugation_example2", 0),
    ("conjugation-check", "conjugation_final", 0),
    ("conjugation-check", "conjugation_wrong_q0", 13),
]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


class TestExitCodes:
    @pytest.mark.parametrize("cmd, name, code", CASES)
    def test_demo_config(self, capsys, cmd, name, code):
        got, report = run(capsys, cmd, "--config", str(CONFIGS / f"{name}.json"), "--json-only")
        assert got == code
        if code != 1:
            assert report is not None

    @pytest.mark.parametrize("name", ["classify_averaged", "classify_sign_change", "classify_tower"])
    def test_classify_snapshot(self, capsys, name):
        _, report = run(capsys, "classify", "--config", str(CONFIGS / f"{name}.json"))
        assert snapshot(f"cli_{name}", report)

    def test_missing_config(self, capsys):
        assert main(["classify", "--config", "/nonexistent.json"]) == 1

    def test_solve_needs_seed(self, capsys, tmp_path):
        cfg = {"operator": {"a": 0, "b": 1, "q": "3/10"}, "cutoffs": {"twoEllMax": 4, "N": 32},
               "f": {"random": {"decay": 1.0}}}
        assert main(["solve", "--config", write_cfg(tmp_path, cfg)]) == 1

    def test_no_resonance_for_witness(self, capsys, tmp_path):
        cfg = {"operator": {"a": 0, "b": 1, "q": "3/10"}}
        assert main(["resonant-witness", "--config", write_cfg(tmp_path, cfg)]) == 1


class TestReports:
    def test_average_certificate(self, capsys):
        _, rep = run(capsys, "classify", "--config", str(CONFIGS / "classify_averaged.json"))
        assert rep["answer"] == "GAH" and rep["certificate"]["kind"] == "C1Holds"

    def test_final_example_is_gah(self, capsys):
        _, rep = run(capsys, "conjugation-check", "--config", str(CONFIGS / "conjugation_final.json"))
        assert rep["P"] == "GAH" and rep["residual"] < 1e-6

    def test_override_cutoff(self, capsys):
        _, rep = run(capsys, "classify", "--config", str(CONFIGS / "classify_float_scan.json"),
                     "--two-ell-max", "8")
        assert rep["cutoffs"]["twoEllMax"] == 8

    def test_singular_files(self, capsys, tmp_path):
        code, rep = run(capsys, "singular", "--config", str(CONFIGS / "singular_sin.json"),
                        "--out", str(tmp_path), "--two-ell-max", "32", "--grid", "128")
        assert code == 0 and rep["confirmed"]
        lines = (tmp_path / "singular.csv").read_text().splitlines()
        assert len(lines) == 33
        u = SparseModalField.loads((tmp_path / "u_field.csv").read_text())
        assert u.N == 128 and len(u.data) == 32

    def test_solve_then_synthesize(self, capsys, tmp_path):
        cfg = {"operator": {"a": 0, "b": 1, "q": "1/2"}, "cutoffs": {"twoEllMax": 6, "N": 32}}
        code, rep = run(capsys, "resonant-witness", "--config", write_cfg(tmp_path, cfg),
                        "--out", str(tmp_path))
        assert code == 0 and rep["non_decaying"]
        syn = {"synthesize": {"field": str(tmp_path / "u_field.csv"),
                              "points": [[0.1, 0.2, 0.3, 0.4]], "grid": [3, 3, 5]}}
        code, rep = run(capsys, "synthesize", "--config", write_cfg(tmp_path, syn, "syn.json"),
                        "--out", str(tmp_path))
        assert code == 0 and len(rep["values"]) == 1 and rep["grid"]["shape"] == [32, 3, 3, 5]
        assert (tmp_path / "grid.txt").exists()

    def test_json_only_writes_nothing(self, capsys, tmp_path):
        out = tmp_path / "out"
        run(capsys, "solve", "--config", str(CONFIGS / "solve_random.json"), "--out", str(out),
            "--json-only")
        assert not out.exists()
