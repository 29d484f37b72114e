import csv
import io
import json
import math
import subprocess
import sys

import pytest

from kshflow import PiTime, QuadraticHamiltonian, classify_polarization
from kshflow.cli import ConfigError, RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestClassify:
    def test_nine_point_sweep(self, capsys):
        code, out, _ = run(capsys, "classify", "--alpha", "1", "--t-grid", f"0:{math.pi!r}:9")
        assert code == 0
        classes = [r["class"] for r in rows_of(out)]
        assert classes == ["Schrodinger"] + ["Kahler"] * 3 + ["RealLine"] + ["AntiKahler"] * 3 + ["Schrodinger"]
        # oracle: pointwise classification
        H = QuadraticHamiltonian(1, 0, -1)
        for r in rows_of(out):
            assert r["class"] == classify_polarization(H, float(r["t"])).tag.value

    def test_zero(self, capsys):
        code, out, _ = run(capsys, "classify", "--t", "0")
        assert rows_of(out)[0]["class"] == "Schrodinger"

    def test_exact_quarter_period(self, capsys):
        code, out, _ = run(capsys, "classify", "--alpha", "1", "--t-pi", "1/2")
        row = rows_of(out)[0]
        assert row["class"] == "RealLine" and row["direction"] == "0;1" and row["t_pi"] == "1/2"
        assert float(row["kahler_density"]) == 0.0

    def test_csv_format(self, capsys, tmp_path):
        path = tmp_path / "c.csv"
        run(capsys, "classify", "--t-grid", "0:1:3", "--out", str(path))
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        first = raw.decode().splitlines()[2]
        assert first.startswith("0.5,")
        assert "0.47942553860420301" in raw.decode()  # sin(1/2) ... w_b_im at t=0.5 with 17 digits

    def test_deterministic(self, capsys):
        a = run(capsys, "classify", "--t-grid", "0:3:11")[1]
        b = run(capsys, "classify", "--t-grid", "0:3:11")[1]
        assert a == b


class TestUnitarity:
    def test_eighth_period_grid(self, capsys):
        code, out, _ = run(capsys, "unitarity", "--alpha", "1", "--t", repr(math.pi / 4), "--y-grid", "-2:2:5,-2:2:5")
        rows = rows_of(out)
        assert code == 0 and len(rows) == 25
        for r in rows:
            assert r["status"] == "ok"
            assert abs(float(r["closed_form_norm"]) - 1) < 1e-12
            assert abs(float(r["quadrature_norm"]) - 1) < 1e-8

    def test_zero_time(self, capsys):
        code, out, _ = run(capsys, "unitarity", "--t", "0", "--y-grid", "-1:1:3,-1:1:3")
        assert code == 0
        assert all(abs(float(r["closed_form_norm"]) - 1) < 1e-14 for r in rows_of(out))

    def test_anti_kahler_rows(self, capsys):
        code, out, _ = run(capsys, "unitarity", "--t", "2.0", "--y-grid", "-1:1:2,0:1:2")
        assert code == 0
        assert {r["status"] for r in rows_of(out)} == {"divergent"}

    def test_general_hamiltonian(self, capsys):
        code, out, _ = run(capsys, "unitarity", "--h11", "2", "--h12", "1", "--h22", "-1", "--t", "0.2",
                           "--y-grid", "-1:1:2,-1:1:2")
        assert code == 0 and {r["status"] for r in rows_of(out)} == {"ok"}

    def test_json(self, capsys):
        code, out, _ = run(capsys, "unitarity", "--t", "0.5", "--y-grid", "0:1:2,0:0:1", "--format", "json")
        doc = json.loads(out)
        assert set(doc) == {"config", "rows", "summary"}
        assert doc["summary"]["failures"] == 0
        cfg = RunConfig.from_dict(doc["config"])
        assert cfg.times() == [0.5]


class TestEndpoints:
    def test_defaults(self, capsys):
        code, out, _ = run(capsys, "endpoints", "--alpha", "1")
        rows = rows_of(out)
        assert code == 0
        assert max(float(r["deviation"]) for r in rows if r["check"] == "fourier") < 1e-10
        assert max(float(r["deviation"]) for r in rows if r["check"] == "sb") < 1e-9

    def test_zero_pair(self, capsys):
        code, out, _ = run(capsys, "endpoints", "--t", "0", "--y-grid", "0:0:1,0:0:1")
        sb = [r for r in rows_of(out) if r["check"] == "sb"][0]
        assert float(sb["t_tilde"]) == 0 and float(sb["deviation"]) == 0

    def test_classical_pair(self, capsys):
        code, out, _ = run(capsys, "endpoints", "--alpha", "1", "--t-pi", "1/4", "--y-grid", "-1:1:3,-1:1:3")
        sb = [r for r in rows_of(out) if r["check"] == "sb"]
        assert all(float(r["t_tilde"]) == pytest.approx(1.0) for r in sb)
        assert max(float(r["deviation"]) for r in sb) < 1e-9
        assert max(float(r["constant_dev"]) for r in sb) < 1e-9

    def test_tolerance_failure(self, capsys):
        code, _, _ = run(capsys, "endpoints", "--tol", "sb=0", "--t", "0.3", "--y-grid", "1:1:1,1:1:1")
        assert code == 1

    def test_needs_canonical(self, capsys):
        code, _, err = run(capsys, "endpoints", "--h12", "0.5")
        assert code == 2 and "hamiltonian" in err


class TestConfigErrors:
    @pytest.mark.parametrize(
        "argv, field",
        [
            (["classify", "--alpha", "1", "--h12", "0.3"], "alpha"),
            (["classify", "--h22", "1"], "hamiltonian"),
            (["classify", "--t-grid", "0:1:0"], "t_grid.count"),
            (["classify", "--t-grid", "1:1:4"], "t_grid"),
            (["classify", "--t-pi", "x/2"], "t_pi"),
            (["classify", "--y-grid", "0:1:3"], "y_grid"),
            (["classify", "--y-grid", "1:0:3,0:1:2"], "y_grid.p"),
            (["classify", "--tol", "nonsense=1"], "tolerances.nonsense"),
            (["classify", "--tol", "sb"], "tol"),
            (["classify", "--t", "1", "--t-pi", "1/2"], "t_pi"),
        ],
    )
    def test_field_named(self, capsys, argv, field):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert f"in {field}:" in err

    def test_unknown_config_key(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"hamiltonian": [1, 0, -1], "colour": "red"}))
        code, _, err = run(capsys, "classify", "--config", str(path))
        assert code == 2 and "colour" in err

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"hamiltonian": [1, 0, -4], "t_grid": {"pi": [[1, 2]]}}))
        code, out, _ = run(capsys, "classify", "--config", str(path))
        row = rows_of(out)[0]
        assert code == 0 and row["class"] == "RealLine"
        assert float(row["t"]) == pytest.approx(math.pi / 4)

    def test_bad_argparse_usage(self, capsys):
        assert run(capsys, "classify", "--format", "xml")[0] == 2
        assert run(capsys, "frobnicate")[0] == 2

    def test_run_config_direct(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"output": {"format": "yaml"}})
        assert RunConfig.from_dict({"t_grid": {"pi": [[1, 4]]}}).times() == [PiTime(1, 4)]


class TestAccept:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "accept", "--list")
        assert code == 0 and len(out.split()) == 10

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "kshflow", "accept", "--list"], capture_output=True, text=True)
        assert proc.returncode == 0 and "unitarity" in proc.stdout
