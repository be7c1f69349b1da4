import csv

import numpy as np
import pytest

from adavr import (Algorithm, ExperimentConfig, LOGISTIC, execute, init_point,
                   summarize)
from adavr.cli import main
from adavr.harness import CSV_HEADER, SUMMARY_HEADER


class TestInitPoint:
    def test_range(self):
        p = init_point(200, seed=1)
        assert p.shape == (200,)
        assert (p >= 0.0).all() and (p <= 10.0).all()

    def test_deterministic(self):
        np.testing.assert_array_equal(init_point(8, seed=3), init_point(8, seed=3))

    def test_mean_monte_carlo(self):
        p = init_point(100_000, seed=7)
        assert abs(p.mean() - 5.0) <= 0.05


def small_config(tmp_path, **kw):
    defaults = dict(
        data="synth:25,4", loss=LOGISTIC, algorithms=[Algorithm.SVRG],
        epochs=3, out=tmp_path / "trace.csv", reps=2, base_seed=0,
        step_size=0.5, radius=100.0)
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames, list(reader)


class TestExecute:
    def test_row_count(self, tmp_path):
        cfg = small_config(tmp_path, algorithms=[Algorithm.SVRG, Algorithm.ADAVRAG_II],
                           epochs=3, reps=2)
        header, rows = read_rows(execute(cfg))
        assert header == CSV_HEADER
        assert len(rows) == 2 * 2 * (3 + 1)

    def test_zero_epochs_single_row_per_algo(self, tmp_path):
        cfg = small_config(tmp_path, epochs=0, reps=1)
        _, rows = read_rows(execute(cfg))
        assert len(rows) == 1
        assert rows[0]["epoch"] == "0" and rows[0]["grads"] == "0"

    def test_reps_disjoint_seeds_and_rows_sorted(self, tmp_path):
        cfg = small_config(tmp_path, reps=3,
                           algorithms=[Algorithm.SVRG, Algorithm.VRAG])
        _, rows = read_rows(execute(cfg))
        seeds = {(r["rep"], r["seed"]) for r in rows}
        assert seeds == {("0", "0"), ("1", "1"), ("2", "2")}
        keys = [(r["algorithm"], int(r["rep"]), int(r["epoch"])) for r in rows]
        assert keys == sorted(keys)

    def test_grads_over_n_exact(self, tmp_path):
        cfg = small_config(tmp_path, reps=1)
        _, rows = read_rows(execute(cfg))
        for r in rows:
            assert float(r["grads_over_n"]) == int(r["grads"]) / 25

    def test_objectives_finite_and_grads_nondecreasing(self, tmp_path):
        cfg = small_config(tmp_path, reps=2,
                           algorithms=[Algorithm.ADAVRAE, Algorithm.SVRGPP])
        _, rows = read_rows(execute(cfg))
        by_key = {}
        for r in rows:
            assert np.isfinite(float(r["objective"]))
            by_key.setdefault((r["algorithm"], r["rep"]), []).append(int(r["grads"]))
        for grads in by_key.values():
            assert grads == sorted(grads)

    def test_rerun_byte_identical(self, tmp_path):
        cfg1 = small_config(tmp_path, out=tmp_path / "a.csv")
        cfg2 = small_config(tmp_path, out=tmp_path / "b.csv")
        p1, p2 = execute(cfg1), execute(cfg2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rerun_byte_identical_across_processes(self, tmp_path):
        import subprocess
        import sys

        args = ["run", "--data", "synth:30,4", "--loss", "logistic",
                "--algo", "adavrag-ii", "--algo", "svrg", "--step", "0.5",
                "--epochs", "2", "--reps", "2"]
        outs = []
        for name in ("p1.csv", "p2.csv"):
            out = tmp_path / name
            subprocess.run([sys.executable, "-m", "adavr.cli",
                            *args, "--out", str(out)], check=True,
                           capture_output=True)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_option_column(self, tmp_path):
        cfg = small_config(tmp_path, reps=1,
                           algorithms=[Algorithm.ADAVRAG_I, Algorithm.ADAVRAG_II])
        _, rows = read_rows(execute(cfg))
        options = {(r["algorithm"], r["option"]) for r in rows}
        assert options == {("adavrag-i", "I"), ("adavrag-ii", "II")}

    def test_per_algorithm_overrides(self, tmp_path):
        cfg = small_config(
            tmp_path, reps=1, algorithms=[Algorithm.SVRG, Algorithm.SVRGPP],
            step_size=0.5, overrides={Algorithm.SVRGPP: {"step_size": 0.0}})
        _, rows = read_rows(execute(cfg))
        frozen = [r for r in rows if r["algorithm"] == "svrgpp"]
        moving = [r for r in rows if r["algorithm"] == "svrg"]
        assert len({r["objective"] for r in frozen}) == 1
        assert len({r["objective"] for r in moving}) > 1


class TestSummarize:
    def test_single_rep_degenerate_ci(self, tmp_path):
        cfg = small_config(tmp_path, reps=1)
        out = summarize(execute(cfg), tmp_path / "summary.csv")
        header, rows = read_rows(out)
        assert header == SUMMARY_HEADER
        for r in rows:
            assert r["ci_low"] == r["ci_high"] == r["mean_objective"]

    def test_two_values_hand_computed(self, tmp_path):
        # objectives {1, 3}: mean 2, sd sqrt(2), half-width 1.96*sqrt(2)/sqrt(2)
        trace = tmp_path / "t.csv"
        with open(trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            writer.writerow(["svrg", "", 0, 0, 1, 75, 3.0, 1.0])
            writer.writerow(["svrg", "", 1, 1, 1, 75, 3.0, 3.0])
        _, rows = read_rows(summarize(trace, tmp_path / "s.csv"))
        assert len(rows) == 1
        assert float(rows[0]["mean_objective"]) == 2.0
        assert float(rows[0]["ci_low"]) == pytest.approx(2.0 - 1.96)
        assert float(rows[0]["ci_high"]) == pytest.approx(2.0 + 1.96)

    def test_row_order_invariant(self, tmp_path):
        cfg = small_config(tmp_path, reps=2)
        trace = execute(cfg)
        lines = trace.read_text().splitlines()
        shuffled = tmp_path / "shuffled.csv"
        shuffled.write_text("\n".join([lines[0]] + lines[:0:-1]) + "\n")
        s1 = summarize(trace, tmp_path / "s1.csv")
        s2 = summarize(shuffled, tmp_path / "s2.csv")
        assert s1.read_bytes() == s2.read_bytes()

    def test_rejects_foreign_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            summarize(bad, tmp_path / "out.csv")


class TestCli:
    def test_run_and_summarize(self, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        rc = main(["run", "--data", "synth:20,3", "--loss", "logistic",
                   "--algo", "svrg", "--step", "0.5", "--epochs", "2",
                   "--reps", "1", "--out", str(out)])
        assert rc == 0 and out.exists()
        rc = main(["summarize", "--in", str(out), "--out", str(tmp_path / "s.csv")])
        assert rc == 0

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "data = synth:20,3\nloss = logistic\nalgo = svrg\nstep = 0.5\n"
            f"epochs = 5   # overridden below\nreps = 1\nout = {tmp_path / 'c.csv'}\n")
        rc = main(["run", "--config", str(cfg), "--epochs", "1"])
        assert rc == 0
        _, rows = read_rows(tmp_path / "c.csv")
        assert len(rows) == 2  # epochs 0 and 1

    def test_missing_required(self, capsys):
        assert main(["run", "--loss", "logistic"]) == 2

    def test_bad_dataset_path(self, tmp_path, capsys):
        rc = main(["run", "--data", str(tmp_path / "missing.libsvm"),
                   "--epochs", "1", "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_parse_error_has_line_number(self, tmp_path, capsys):
        bad = tmp_path / "bad.libsvm"
        bad.write_text("+1 3:1 2:5\n")
        rc = main(["run", "--data", str(bad), "--algo", "svrg", "--step", "0.1",
                   "--epochs", "1", "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "line 1" in capsys.readouterr().err

    def test_verify_command(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out.replace("FAILED", "")

    def test_bench_command(self, capsys):
        rc = main(["bench", "--n", "60", "--d", "5", "--epochs", "2"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "speedup" in out
