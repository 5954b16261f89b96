"""End-to-end runs of the command line interface."""

import json
import math

import pytest

from tamsde import InputError
from tamsde.cli import ExperimentConfig, main, run_experiment

RATE_HEADER = "k,delta,n_paths,mse,log2_mse,std_error,mean_fine_steps,mean_coarse_steps"
COMPARE_HEADER = "scheme,T,k,log2_NT,log2_mse"
MOMENTS_HEADER = "T,p,mean_abs_p,std_error"


def run(args):
    return main([str(a) for a in args])


class TestRateCommand:
    def test_outputs_and_summary(self, tmp_path, capsys):
        code = run(["rate", "--model", "gbm", "--k-min", "1", "--k-max", "3",
                    "--paths", "60", "--T", "1", "--seed", "42",
                    "--threads", "1", "--out", tmp_path])
        assert code == 0
        csv_text = (tmp_path / "rate.csv").read_text()
        lines = csv_text.strip().split("\n")
        assert lines[0] == RATE_HEADER
        assert len(lines) == 1 + 3  # header + one row per level
        assert lines[1].startswith("1,0.5,60,")
        summary = json.loads((tmp_path / "rate.json").read_text())
        assert set(summary) == {"slope", "intercept", "empirical_rate",
                                "alpha_prime", "r_squared",
                                "theoretical_rate"}
        assert summary["theoretical_rate"] == 1.0
        assert summary["empirical_rate"] == -summary["slope"] / 2
        # progress goes to stderr, not into the files
        err = capsys.readouterr().err
        assert "k=1" in err and "k=1" not in csv_text

    def test_model2_theoretical_rate(self, tmp_path):
        code = run(["rate", "--model", "model2", "--k-min", "1", "--k-max",
                    "2", "--paths", "40", "--T", "1", "--seed", "1",
                    "--threads", "1", "--out", tmp_path])
        assert code == 0
        summary = json.loads((tmp_path / "rate.json").read_text())
        assert summary["theoretical_rate"] == pytest.approx(0.6, abs=1e-15)

    def test_reruns_are_byte_identical(self, tmp_path):
        args = ["rate", "--model", "model1", "--k-min", "1", "--k-max", "2",
                "--paths", "50", "--T", "1", "--seed", "9", "--threads", "1"]
        run(args + ["--out", tmp_path / "a"])
        run(args + ["--out", tmp_path / "b"])
        assert (tmp_path / "a/rate.csv").read_bytes() == \
               (tmp_path / "b/rate.csv").read_bytes()
        assert (tmp_path / "a/rate.json").read_bytes() == \
               (tmp_path / "b/rate.json").read_bytes()

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        args = ["rate", "--model", "model1", "--k-min", "1", "--k-max", "2",
                "--paths", "40", "--T", "1", "--seed", "9"]
        run(args + ["--threads", "1", "--out", tmp_path / "serial"])
        run(args + ["--threads", "2", "--out", tmp_path / "pooled"])
        assert (tmp_path / "serial/rate.csv").read_bytes() == \
               (tmp_path / "pooled/rate.csv").read_bytes()

    def test_extending_k_range_preserves_lower_rows(self, tmp_path):
        base = ["rate", "--model", "model1", "--paths", "30", "--T", "1",
                "--seed", "4", "--threads", "1"]
        run(base + ["--k-min", "1", "--k-max", "2", "--out", tmp_path / "lo"])
        run(base + ["--k-min", "1", "--k-max", "3", "--out", tmp_path / "hi"])
        lo = (tmp_path / "lo/rate.csv").read_text().strip().split("\n")
        hi = (tmp_path / "hi/rate.csv").read_text().strip().split("\n")
        assert hi[:3] == lo[:3]


class TestMomentsCommand:
    def test_outputs(self, tmp_path):
        code = run(["moments", "--model", "model1", "--k", "2", "--T", "0.5",
                    "1.0", "--p", "2", "--paths", "30", "--seed", "3",
                    "--threads", "1", "--out", tmp_path])
        assert code == 0
        lines = (tmp_path / "moments.csv").read_text().strip().split("\n")
        assert lines[0] == MOMENTS_HEADER
        assert len(lines) == 3
        assert lines[1].startswith("0.5,2.0,")
        assert lines[2].startswith("1.0,2.0,")

    def test_multiple_moment_orders(self, tmp_path):
        run(["moments", "--model", "gbm", "--k", "3", "--T", "1", "--p", "1",
             "2", "--paths", "20", "--seed", "0", "--threads", "1",
             "--out", tmp_path])
        lines = (tmp_path / "moments.csv").read_text().strip().split("\n")
        assert len(lines) == 3


class TestCompareCommand:
    def test_outputs(self, tmp_path):
        code = run(["compare", "--model", "model1", "--k-min", "1",
                    "--k-max", "2", "--T", "1", "--paths", "25", "--seed",
                    "6", "--threads", "1", "--out", tmp_path])
        assert code == 0
        lines = (tmp_path / "compare.csv").read_text().strip().split("\n")
        assert lines[0] == COMPARE_HEADER
        assert len(lines) == 5  # 2 levels x 2 schemes + header
        schemes = [ln.split(",")[0] for ln in lines[1:]]
        assert schemes == ["tam", "tm", "tam", "tm"]
        # TM work column is exact: log2(T * 2^k)
        tm_row = lines[2].split(",")
        assert float(tm_row[3]) == math.log2(2.0)


class TestVerifyAssumptionsCommand:
    def test_model1_report(self, tmp_path):
        code = run(["verify-assumptions", "--model", "model1", "--grid",
                    "-50:50:500", "--seed", "0", "--out", tmp_path])
        assert code == 0
        report = json.loads((tmp_path / "assumptions.json").read_text())
        assert report["model"] == "model1"
        assert report["grid"] == {"lo": -50.0, "hi": 50.0, "n": 500}
        assert report["dissipativity"]["holds"] is True
        assert report["one_sided_lipschitz"]["holds"] is True
        assert "worst_margin" in report["dissipativity"]
        assert len(report["one_sided_lipschitz"]["worst_pair"]) == 2

    def test_model2_report(self, tmp_path):
        code = run(["verify-assumptions", "--model", "model2", "--grid",
                    "-50:50:500", "--seed", "0", "--out", tmp_path])
        assert code == 0
        report = json.loads((tmp_path / "assumptions.json").read_text())
        assert report["dissipativity"]["holds"] is True
        assert report["one_sided_lipschitz"]["holds"] is True

    def test_determinism(self, tmp_path):
        args = ["verify-assumptions", "--model", "model2", "--grid",
                "-10:10:100", "--seed", "5"]
        run(args + ["--out", tmp_path / "a"])
        run(args + ["--out", tmp_path / "b"])
        assert (tmp_path / "a/assumptions.json").read_bytes() == \
               (tmp_path / "b/assumptions.json").read_bytes()

    def test_bad_grid_rejected(self, tmp_path, capsys):
        code = run(["verify-assumptions", "--model", "model1", "--grid",
                    "0:1", "--out", tmp_path])
        assert code == 2
        assert "grid" in capsys.readouterr().err


class TestErrorHandling:
    def test_unknown_model(self, tmp_path, capsys):
        code = run(["rate", "--model", "mystery", "--out", tmp_path])
        assert code == 2
        assert "unknown model" in capsys.readouterr().err

    def test_invalid_k_range(self, tmp_path, capsys):
        code = run(["rate", "--model", "model1", "--k-min", "3", "--k-max",
                    "2", "--out", tmp_path])
        assert code == 2
        assert "level range" in capsys.readouterr().err

    def test_k_min_below_one(self, tmp_path, capsys):
        code = run(["rate", "--model", "model1", "--k-min", "0", "--k-max",
                    "2", "--out", tmp_path])
        assert code == 2
        assert "level range" in capsys.readouterr().err

    def test_too_few_paths(self, tmp_path, capsys):
        code = run(["rate", "--model", "model1", "--paths", "1",
                    "--out", tmp_path])
        assert code == 2
        assert "n_paths" in capsys.readouterr().err

    def test_unwritable_output(self, capsys):
        code = run(["rate", "--model", "model1", "--k-min", "1", "--k-max",
                    "1", "--paths", "2", "--T", "0.25", "--threads", "1",
                    "--seed", "0", "--out", "/dev/null/nope"])
        assert code == 2
        assert "output" in capsys.readouterr().err

    def test_estimation_failure_exit_code(self, tmp_path, capsys):
        # model file whose drift explodes from a huge start: every path
        # fails, the rate command must exit 3
        doc = {
            "name": "exploder", "x0": 1e80,
            "drift": [{"coeff": 1e150, "power": 3}],
            "diffusion": [{"coeff": 0.0}],
            "regularity": {"alpha": 1.0, "l": 3.0, "gamma": 1.0, "eta": 1.0,
                           "lambda_os": 1.0, "p0": 20.0},
        }
        path = tmp_path / "exploder.json"
        path.write_text(json.dumps(doc))
        code = run(["rate", "--model", path, "--k-min", "1", "--k-max", "1",
                    "--paths", "3", "--T", "1e300", "--l0", "4",
                    "--threads", "1", "--out", tmp_path])
        assert code == 3
        assert "estimation error" in capsys.readouterr().err


class TestExperimentConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            ExperimentConfig(kind="rate", model="model1", k_min=0)
        with pytest.raises(InputError):
            ExperimentConfig(kind="rate", model="model1", k_min=3, k_max=2)
        with pytest.raises(InputError):
            ExperimentConfig(kind="rate", model="model1", n_paths=1)
        with pytest.raises(InputError):
            ExperimentConfig(kind="rate", model="model1", t_values=(0.0,))
        with pytest.raises(InputError):
            ExperimentConfig(kind="nope", model="model1")
        with pytest.raises(InputError):
            ExperimentConfig(kind="rate", model="model1", threads=0)

    def test_run_experiment_is_public(self, tmp_path):
        cfg = ExperimentConfig(kind="verify-assumptions", model="gbm",
                               grid="-5:5:50", out_dir=str(tmp_path))
        run_experiment(cfg)
        assert (tmp_path / "assumptions.json").exists()
