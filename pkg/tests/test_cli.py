import csv
import json
import subprocess
import sys

import pytest

from sparselab.cli import main


def run_cli(args):
    return main(args)


class TestUsageErrors:
    def test_unknown_experiment_exits_2(self):
        result = subprocess.run(
            [sys.executable, "-m", "sparselab.cli", "no-such-experiment"],
            capture_output=True,
        )
        assert result.returncode == 2

    def test_missing_subcommand_exits_2(self):
        result = subprocess.run(
            [sys.executable, "-m", "sparselab.cli"], capture_output=True
        )
        assert result.returncode == 2


class TestInterpCommand:
    def test_prints_json_line(self, capsys, tmp_path):
        out = tmp_path / "interp.json"
        code = run_cli(
            ["interp", "--alpha", "0.5", "--r", "1.75", "--format", "json",
             "--out", str(out)]
        )
        assert code == 0
        printed = json.loads(capsys.readouterr().out.strip().splitlines()[0])
        assert printed["r0"] == pytest.approx(1.5)
        assert printed["theta0"] == pytest.approx(2.0 / 3.0)
        assert printed["eta"] == pytest.approx(1.0 / 7.0)
        doc = json.loads(out.read_text())
        assert doc["config"]["alpha"] == 0.5

    def test_numerical_failure_exits_1(self, capsys):
        # r outside (1, 2) is a numerical-domain failure
        assert run_cli(["interp", "--alpha", "0.5", "--r", "2.5"]) == 1


class TestConcentrationCommand:
    def test_csv_schema_and_determinism(self, tmp_path, capsys):
        args = ["concentration", "--alpha", "0.5", "--k-min", "6", "--k-max", "7",
                "--trials", "4", "--seed", "3"]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        assert out1.read_text() == out2.read_text()
        lines = out1.read_text().splitlines()
        assert lines[0].startswith("# sparselab")
        assert lines[1].startswith("# config:")
        rows = list(csv.DictReader(lines[2:]))
        assert list(rows[0]) == ["alpha", "k", "seed", "opnorm", "bound", "exceed"]
        assert len(rows) == 8

    def test_config_file_overrides_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k_min": 5, "k_max": 5, "trials": 2}))
        out = tmp_path / "c.csv"
        assert run_cli(
            ["concentration", "--alpha", "0.5", "--k-min", "9", "--k-max", "9",
             "--trials", "7", "--config", str(cfg), "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()[2:]))
        assert len(rows) == 2
        assert all(r["k"] == "5" for r in rows)


class TestDominationCommand:
    def test_ratio_table(self, tmp_path, capsys):
        out = tmp_path / "dom.csv"
        assert run_cli(
            ["domination", "--alpha", "0.3", "--r", "1.5", "--n", "128",
             "--trials", "5", "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()[2:]))
        assert len(rows) == 5
        assert all(float(r["ratio"]) >= 0 for r in rows)

    def test_hilbert_variant(self, tmp_path, capsys):
        out = tmp_path / "dom_h.csv"
        assert run_cli(
            ["domination", "--r", "1.1", "--n", "128", "--trials", "3",
             "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()[2:]))
        assert rows[0]["operator"] == "hilbert"


class TestWeightCommands:
    def test_weight_char_json(self, tmp_path, capsys):
        out = tmp_path / "wc.json"
        assert run_cli(
            ["weight-char", "--p", "2", "--r", "1.5", "--n", "64",
             "--weight", "a=0.5", "--format", "json", "--out", str(out)]
        ) == 0
        doc = json.loads(out.read_text())
        kinds = {row["characteristic"] for row in doc["results"]}
        assert kinds == {"A_p", "RH_r"}

    def test_ww_check_rejects_bad_alpha(self, capsys):
        assert run_cli(
            ["ww-check", "--alpha", "1.5", "--p", "2", "--r", "1.6", "--n", "32"]
        ) == 1


class TestOscCommands:
    def test_osc_decay_small(self, tmp_path, capsys):
        out = tmp_path / "osc.csv"
        assert run_cli(
            ["osc-decay", "--k-min", "4", "--k-max", "5", "--phase", "d=2",
             "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()[2:]))
        norms = [float(r["norm"]) for r in rows]
        assert norms[0] > norms[1]
