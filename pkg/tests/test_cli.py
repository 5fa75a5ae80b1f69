import csv
import io
import json
import subprocess
import sys

import pytest

from helpers import MPG, MPG_HUBERT_TABLE
from skewbox.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestSummarise:
    def test_mpg_hubert_table(self, capsys):
        code, out, _ = run(capsys, "summarise", "--input", str(MPG), "--group", "class", "--value", "hwy",
                           "--method", "hubert", "--mc-estimator", "split-median")
        assert code == 0
        got = rows(out)
        assert [r["group"] for r in got] == sorted(MPG_HUBERT_TABLE)
        for r in got:
            lo, mid, up, n_out = MPG_HUBERT_TABLE[r["group"]]
            assert (float(r["lower"]), float(r["middle"]), float(r["upper"])) == (lo, mid, up)
            assert int(r["n_outliers"]) == n_out
            vals = [float(v) for v in r["outlier_values"].split(";")] if r["outlier_values"] else []
            assert vals == sorted(vals) and len(vals) == n_out

    def test_hand_checkable_tukey(self, tmp_path, capsys):
        f = tmp_path / "four.csv"
        f.write_text("g,v\na,1\na,2\na,3\na,10\n")
        code, out, _ = run(capsys, "summarise", "--input", str(f), "--group", "g", "--value", "v")
        # Q1 = 1.75, Q2 = 2.5, Q3 = 4.75, IQR = 3 -> fences -2.75 and 9.25
        assert code == 0
        assert out.splitlines()[1] == "a,-2.75,1.75,2.5,4.75,9.25,4,1,10.0"

    def test_huge_k_flags_nothing(self, capsys):
        code, out, _ = run(capsys, "summarise", "--input", str(MPG), "--group", "class", "--value", "hwy",
                           "--k", "1e9", "--method", "walker")
        assert code == 0 and all(r["n_outliers"] == "0" for r in rows(out))

    def test_emit_indices_and_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO("g,v\nx,1\nx,2\nx,3\nx,4\nx,50\n"))
        code, out, _ = run(capsys, "summarise", "--group", "g", "--value", "v", "--emit-indices")
        assert code == 0 and rows(out)[0]["outlier_rows"] == "5"

    def test_partial_failure(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        f.write_text("g,v\na,1\na,2\nb,1\nb,2\nb,3\nb,4\n")
        code, out, err = run(capsys, "summarise", "--input", str(f), "--group", "g", "--value", "v")
        assert code == 2
        assert [r["group"] for r in rows(out)] == ["b"]
        assert "'a'" in err and "too few" in err

    @pytest.mark.parametrize(
        "argv,msg",
        [(["--input", "/nonexistent.csv", "--group", "g", "--value", "v"], "cannot read"),
         (["--input", str(MPG), "--group", "nope", "--value", "hwy"], "not found"),
         (["--input", str(MPG), "--group", "class", "--value", "hwy", "--method", "fancy"], "valid methods"),
         (["--input", str(MPG), "--group", "class", "--value", "hwy", "--k", "-1"], "positive")],
    )
    def test_usage_errors(self, capsys, argv, msg):
        code, _, err = run(capsys, "summarise", *argv)
        assert code == 1 and msg in err

    def test_bad_rows_reported_with_numbers(self, tmp_path, capsys):
        f = tmp_path / "bad.csv"
        f.write_text("g,v\na,1\na,oops\na,3\na,inf\n")
        code, _, err = run(capsys, "summarise", "--input", str(f), "--group", "g", "--value", "v")
        assert code == 1 and "row 2" in err and "row 4" in err


class TestSimulate:
    ARGS = ["simulate", "--grid-alpha", "0.5,0.5,1", "--grid-p", "2,2,1", "--reps", "10", "--seed", "7"]

    def test_deterministic_files(self, tmp_path, capsys):
        for name in ("a", "b"):
            assert run(capsys, *self.ARGS, "--out", str(tmp_path / name))[0] == 0
        for ext in ("csv", "meta"):
            assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()
        meta = json.loads((tmp_path / "a.meta").read_text())
        assert meta["config"]["seed"] == 7 and meta["provenance"]["software"].startswith("skewbox")

    def test_workers_do_not_change_output(self, tmp_path, capsys):
        base = ["simulate", "--grid-alpha", "0.1,0.9,3", "--grid-p", "1,4,2,log", "--reps", "8",
                "--scenario", "masking", "--n", "40", "--method", "babura"]
        run(capsys, *base, "--out", str(tmp_path / "one"))
        run(capsys, *base, "--workers", "2", "--out", str(tmp_path / "two"))
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()

    def test_summary_line_and_multi_method(self, tmp_path, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--method", "tukey,walker", "--out", str(tmp_path / "m"))
        assert code == 0
        assert (tmp_path / "m-tukey.csv").exists() and (tmp_path / "m-walker.csv").exists()
        assert "mean rate" in out and "failed cells 0" in out

    def test_zero_contamination(self, tmp_path, capsys):
        code, _, err = run(capsys, "simulate", "--scenario", "masking", "--contamination", "0",
                           "--out", str(tmp_path / "x"))
        assert code == 1 and "contamination must plant at least one outlier" in err
        assert not (tmp_path / "x.csv").exists()

    @pytest.mark.parametrize("extra", [["--grid-alpha", "0.9,0.1,3"], ["--grid-p", "1,2"], ["--reps", "0"],
                                       ["--n", "2"], ["--tail-quantile", "1.2"], ["--workers", "0"]])
    def test_invalid_config(self, tmp_path, capsys, extra):
        assert run(capsys, "simulate", "--out", str(tmp_path / "x"), *extra)[0] == 1


class TestRender:
    def test_mosaic_round_trip(self, tmp_path, capsys):
        run(capsys, "simulate", "--grid-alpha", "0.1,0.9,3", "--grid-p", "1,4,2,log", "--reps", "5",
            "--out", str(tmp_path / "s"))
        code, _, _ = run(capsys, "render", "--kind", "mosaic", "--input", str(tmp_path / "s.csv"),
                         "--out", str(tmp_path / "s.svg"))
        svg = (tmp_path / "s.svg").read_text()
        assert code == 0 and svg.count('class="tile') == 6 and "tukey / swamping" in svg

    def test_boxplot_round_trip(self, tmp_path, capsys):
        _, out, _ = run(capsys, "summarise", "--input", str(MPG), "--group", "class", "--value", "hwy",
                        "--method", "hubert", "--mc-estimator", "split-median")
        (tmp_path / "s.csv").write_text(out)
        code, _, _ = run(capsys, "render", "--kind", "boxplot", "--input", str(tmp_path / "s.csv"),
                         "--out", str(tmp_path / "b.svg"))
        svg = (tmp_path / "b.svg").read_text()
        assert code == 0
        assert svg.count("<circle") == sum(v[3] for v in MPG_HUBERT_TABLE.values())

    def test_malformed_csv(self, tmp_path, capsys):
        (tmp_path / "bad.csv").write_text("alpha_index,p_index,alpha,p,rate,stderr,reps_completed,reps_failed\n"
                                          "0,0,0.5,2.0,zz,0,1,0\n")
        code, _, err = run(capsys, "render", "--kind", "mosaic", "--input", str(tmp_path / "bad.csv"),
                           "--out", str(tmp_path / "o.svg"))
        assert code == 1 and "row 2" in err

    def test_bad_color(self, tmp_path, capsys):
        (tmp_path / "s.csv").write_text("group,ymin,lower,middle,upper,ymax,n,n_outliers,outlier_values\n"
                                        "a,0,1,2,3,4,5,0,\n")
        code, _, err = run(capsys, "render", "--kind", "boxplot", "--input", str(tmp_path / "s.csv"),
                           "--out", str(tmp_path / "o.svg"), "--colors", "blue")
        assert code == 1 and "invalid color" in err


class TestSepdCheck:
    def test_symmetric_report(self, capsys):
        code, out, _ = run(capsys, "sepd-check", "--alpha", "0.5", "--p", "2", "--ks-n", "20000")
        rep = {r["quantity"]: r["value"] for r in rows(out)}
        assert code == 0 and rep["ks_pass"] == "pass"
        assert abs(float(rep["quantile_0.5"])) < 1e-14
        assert float(rep["quantile_0.25"]) == pytest.approx(-float(rep["quantile_0.75"]), rel=1e-12)
        assert float(rep["normalizer"]) == pytest.approx(4.0, rel=1e-10)

    def test_normalizer_value(self, capsys):
        from skewbox.sepd import SepdEvaluator, SepdParams

        _, out, _ = run(capsys, "sepd-check", "--alpha", "0.3", "--p", "1.5", "--ks-n", "1000")
        rep = {r["quantity"]: r["value"] for r in rows(out)}
        assert float(rep["normalizer"]) == SepdEvaluator(SepdParams(alpha=0.3, p=1.5)).normalizer

    def test_invalid(self, capsys):
        assert run(capsys, "sepd-check", "--alpha", "1.5")[0] == 1
        assert run(capsys, "sepd-check", "--ks-n", "0")[0] == 1


def test_module_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "skewbox", "--version"], capture_output=True, text=True)
    assert ok.returncode == 0 and "skewbox" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "skewbox", "frobnicate"], capture_output=True, text=True)
    assert bad.returncode == 1
