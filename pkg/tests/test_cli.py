"""Command-line harness: tables, exit codes, config merging, atomic output."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from indexlab.cli import ConfigError, RunConfig, run


def table(text):
    return list(csv.reader(io.StringIO(text)))


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestKernel:
    def test_exp_kl_half_order(self, capsys):
        code, out, _ = invoke(capsys, "kernel", "--family", "exp-kl", "--z", "0.5", "--grid", "1")
        rows = table(out)
        assert code == 0 and rows[0] == ["x", "re", "im", "error"]
        x, re, im, err = map(float, rows[1])
        assert (x, im) == (1.0, 0.0)
        assert re == pytest.approx(math.sqrt(math.pi) * math.exp(-2), rel=1e-12)
        assert err < 1e-8

    def test_incomplete_gamma(self, capsys):
        code, out, _ = invoke(capsys, "kernel", "--family", "inc-gamma", "--z", "1", "--grid", "1")
        _, re, _, err = map(float, table(out)[1])
        assert re == pytest.approx(0.59634736232319407, rel=1e-11) and err < 1e-8

    def test_inverse_kernel(self, capsys):
        code, out, _ = invoke(capsys, "kernel", "--family", "exp-kl", "--representation",
                              "inverse", "--z=-0.5", "--grid", "1")
        _, re, im, err = map(float, table(out)[1])
        assert re == pytest.approx(math.cosh(2) / math.sqrt(math.pi), rel=1e-13)
        assert im == 0.0 and err < 1e-9

    def test_unknown_family_exits_2(self, capsys):
        code, out, err = invoke(capsys, "kernel", "--family", "nope", "--z", "1")
        assert code == 2 and out == "" and "unknown family" in err

    @pytest.mark.parametrize("grid", ["2,1", "0,1", "-1", "1,1"])
    def test_bad_grid_exits_2(self, capsys, grid):
        code, _, err = invoke(capsys, "kernel", "--z", "1", f"--grid={grid}")
        assert code == 2 and "grid" in err

    def test_region_error_exits_2(self, capsys):
        code, _, err = invoke(capsys, "forward", "--family", "exp-kl", "--gamma=-0.8")
        assert code == 2 and "forward transform needs" in err


class TestRoundtrip:
    def test_truncated_exponential(self, capsys):
        code, out, _ = invoke(capsys, "roundtrip", "--family", "truncated-mellin:a=1",
                              "--function", "exp", "--gamma", "0.25", "--grid", "0.5,1",
                              "--format", "json")
        rep = json.loads(out)
        assert code == 0 and rep["max_rel_error"] < 1e-6
        assert set(rep) == {"family", "function", "gamma", "grid", "reconstructed",
                            "reference", "per_point", "max_rel_error", "tail_diagnostics"}

    def test_zero_function(self, capsys):
        code, out, _ = invoke(capsys, "roundtrip", "--function", "zero", "--grid", "0.2,1,5")
        assert code == 0
        assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in table(out)[1:])

    def test_threshold_sets_exit_code(self, capsys):
        args = ["roundtrip", "--family", "inc-gamma", "--grid", "1"]
        assert invoke(capsys, *args)[0] == 0
        assert invoke(capsys, *args, "--threshold", "1e-300")[0] == 1

    def test_slow_decay_exits_3_with_diagnostic(self, capsys, tmp_path):
        out_file = tmp_path / "rt.csv"
        code, out, err = invoke(capsys, "roundtrip", "--family", "exp-kl", "--gamma=-0.25",
                                "--out", str(out_file))
        assert code == 3
        assert "behaves like |tau|^(-0.5)" in err
        assert list(tmp_path.iterdir()) == []


class TestIdentity:
    def test_gamma_suite(self, capsys):
        code, out, _ = invoke(capsys, "identity", "gamma")
        rows = table(out)
        assert code == 0 and rows[0][-1] == "status"
        assert rows[1][0] == "m=2 s=(0.3+1.7j)" and float(rows[1][3]) < 1e-10

    def test_rho_suite(self, capsys):
        code, out, _ = invoke(capsys, "identity", "rho")
        first = table(out)[1]
        assert code == 0 and first[0] == "exp-kl s=1.0"
        assert float(first[1]) == pytest.approx(1.0) and float(first[4]) == pytest.approx(1.0)

    def test_index_integral_suite(self, capsys):
        code, out, _ = invoke(capsys, "identity", "index-integral")
        row = {r[0]: r for r in table(out)[1:]}["x=1 y=1"]
        assert code == 0 and float(row[3]) < 1e-6
        assert float(row[4]) == pytest.approx(0.5 * math.pi ** 1.5 * math.exp(-1.5), rel=1e-15)

    def test_bessel_bound_suite(self, capsys):
        assert invoke(capsys, "identity", "bessel-bound")[0] == 0


class TestConfigAndOutput:
    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# kernel run\nfamily = inc-gamma\ngrid = 1, 2\nformat = json\n")
        code, out, _ = invoke(capsys, "kernel", "--config", str(cfg), "--z", "1", "--grid", "1")
        rows = json.loads(out)
        assert code == 0 and [r["x"] for r in rows] == [1.0]
        assert rows[0]["re"] == pytest.approx(0.59634736232319407, rel=1e-11)

    def test_bad_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        code, _, err = invoke(capsys, "catalog", "--config", str(cfg))
        assert code == 2 and "run.cfg:1" in err

    def test_deterministic_across_thread_caps(self, capsys, tmp_path, monkeypatch):
        paths = []
        for threads in ("1", "4"):
            monkeypatch.setenv("INDEXLAB_THREADS", threads)
            path = tmp_path / f"k{threads}.csv"
            assert invoke(capsys, "kernel", "--family", "one-plus-t2:1", "--z", "1.5+0.5i",
                          "--grid", "0.3,1,2,4", "--out", str(path))[0] == 0
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_catalog(self, capsys):
        code, out, _ = invoke(capsys, "catalog")
        names = [r[0] for r in table(out)[1:]]
        assert code == 0 and names == ["exp", "bessel-k0", "rational", "gaussian", "zero"]

    def test_run_config_validation(self):
        with pytest.raises(ConfigError):
            RunConfig(grid=())
        with pytest.raises(ConfigError):
            RunConfig(output_format="xml")

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "indexlab", "kernel", "--family", "exp-kl",
                               "--z", "0.5", "--grid", "1"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout.startswith("x,re,im,error")
