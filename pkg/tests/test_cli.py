"""CLI subcommand behavior, file outputs and exit codes."""

import json

from chnc.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main
from chnc.data import load_csv

FAST_RUN = [
    "--labeled-fraction", "0.8",
    "--lambda-grid=-1:1:0.05",
    "--cv-folds", "2",
    "--trees", "10",
    "--leaf-fractions", "0.05",
    "--forest-cv-folds", "2",
    "--k", "5",
]


def run_cli(*argv):
    return main(list(argv))


class TestGen:
    def test_writes_csv_and_truth_sidecar(self, tmp_path):
        out = tmp_path / "toy.csv"
        code = run_cli("gen", "--output", str(out), "--n-samples", "50",
                       "--n-features", "3", "--pos-fraction", "0.3",
                       "--seed", "1")
        assert code == EXIT_OK
        ds = load_csv(out, "label")
        assert ds.n == 50 and ds.num_features == 3
        assert (ds.given_label == 1).sum() == 15
        sidecar = tmp_path / "toy.truth.csv"
        assert sidecar.exists()
        assert sidecar.read_text().splitlines()[0] == "id,true_label"

    def test_table_axes_accepted(self, tmp_path):
        out = tmp_path / "axes.csv"
        code = run_cli("gen", "--output", str(out), "--n-samples", "60",
                       "--n-features", "5", "--clusters-per-class", "2",
                       "--class-sep", "2", "--layout", "polytope", "--seed", "2")
        assert code == EXIT_OK

    def test_default_sample_count(self, tmp_path):
        out = tmp_path / "default.csv"
        assert run_cli("gen", "--output", str(out)) == EXIT_OK
        assert load_csv(out, "label").n == 1000

    def test_overwrite_refused_without_force(self, tmp_path):
        out = tmp_path / "x.csv"
        assert run_cli("gen", "--output", str(out), "--n-samples", "10") == EXIT_OK
        assert run_cli("gen", "--output", str(out),
                       "--n-samples", "10") == EXIT_CONFIG
        assert run_cli("gen", "--output", str(out), "--n-samples", "10",
                       "--force") == EXIT_OK


class TestRun:
    def test_synthetic_run_outputs(self, tmp_path):
        out = tmp_path / "run1"
        code = run_cli("run", "--synthetic", "--n-samples", "80",
                       "--n-features", "2", "--class-sep", "4",
                       "--noise-rate", "0.2", "--seed", "3",
                       "--output-dir", str(out), *FAST_RUN)
        assert code == EXIT_OK
        for name in ("manifest.json", "predictions.json", "confidence.csv",
                     "metrics.json", "importances.json"):
            assert (out / name).exists(), name
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["noise_rate"] == 0.2
        assert manifest["split_applied"] is True
        metrics = json.loads((out / "metrics.json").read_text())
        assert 0.0 <= metrics["accuracy"] <= 1.0
        assert metrics["noise_f1"] is not None
        preds = json.loads((out / "predictions.json").read_text())
        assert len(preds["predictions"]) == 16  # 20% of 80

    def test_csv_input_run(self, tmp_path):
        data = tmp_path / "d.csv"
        assert run_cli("gen", "--output", str(data), "--n-samples", "60",
                       "--n-features", "2", "--class-sep", "5",
                       "--seed", "4") == EXIT_OK
        out = tmp_path / "run2"
        assert run_cli("run", "--input", str(data), "--output-dir", str(out),
                       "--seed", "5", *FAST_RUN) == EXIT_OK

    def test_rerun_byte_identical(self, tmp_path):
        args = ("run", "--synthetic", "--n-samples", "70", "--n-features", "2",
                "--class-sep", "3", "--noise-rate", "0.2", "--seed", "11",
                *FAST_RUN)
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(*args, "--output-dir", str(a)) == EXIT_OK
        assert run_cli(*args, "--output-dir", str(b)) == EXIT_OK
        for name in ("predictions.json", "confidence.csv", "metrics.json",
                     "importances.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_bad_grid_is_config_error(self, tmp_path):
        assert run_cli("run", "--synthetic", "--lambda-grid=1:0:0.1",
                       "--output-dir", str(tmp_path / "x")) == EXIT_CONFIG

    def test_missing_input_is_data_error(self, tmp_path):
        code = run_cli("run", "--input", str(tmp_path / "nope.csv"),
                       "--output-dir", str(tmp_path / "x"), *FAST_RUN)
        assert code == EXIT_DATA

    def test_default_grid_parses_to_1001_values(self):
        from chnc.classify import LambdaGrid
        from chnc.cli import _parse_grid

        lo, hi, step = _parse_grid("-1:1:0.002")
        values = LambdaGrid(lo, hi, step).values()
        assert len(values) == 1001
        assert values[0] == -1.0 and values[-1] == 1.0

    def test_noise_levels_from_study(self, tmp_path):
        for rate in ("0.2", "0.3"):
            out = tmp_path / f"noise{rate}"
            assert run_cli("run", "--synthetic", "--n-samples", "60",
                           "--n-features", "2", "--class-sep", "4",
                           "--noise-rate", rate, "--seed", "6",
                           "--output-dir", str(out), *FAST_RUN) == EXIT_OK


class TestCompare:
    def make_metrics_dir(self, tmp_path, name, acc):
        d = tmp_path / name
        d.mkdir()
        payload = {"accuracy": acc, "balanced_accuracy": acc,
                   "noise_recall": None, "noise_precision": None,
                   "noise_f1": 0.5, "acc_improvement_pct": None,
                   "avg_gap_from_max_pct": None}
        (d / "metrics.json").write_text(json.dumps(payload))
        return d

    def test_single_dir_verbatim(self, tmp_path, capsys):
        d = self.make_metrics_dir(tmp_path, "only", 0.9)
        assert run_cli("compare", str(d)) == EXIT_OK
        out = capsys.readouterr().out
        assert "0.9000" in out
        assert "+0.00" in out

    def test_identical_dirs_zero_gap(self, tmp_path, capsys):
        a = self.make_metrics_dir(tmp_path, "a", 0.8)
        b = self.make_metrics_dir(tmp_path, "b", 0.8)
        assert run_cli("compare", str(a), str(b)) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert all("+0.00" in line for line in lines[1:])

    def test_gap_and_improvement_columns(self, tmp_path, capsys):
        a = self.make_metrics_dir(tmp_path, "a", 0.81)
        b = self.make_metrics_dir(tmp_path, "b", 0.9)
        assert run_cli("compare", str(a), str(b)) == EXIT_OK
        out = capsys.readouterr().out
        assert "-10.00" in out   # gap of a from max
        assert "+11.11" in out   # improvement of b over first (a)

    def test_missing_metrics_file(self, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        assert run_cli("compare", str(d)) == EXIT_DATA

    def test_schema_mismatch(self, tmp_path):
        d = tmp_path / "bad"
        d.mkdir()
        (d / "metrics.json").write_text('{"unexpected_key": 1}')
        assert run_cli("compare", str(d)) == EXIT_DATA
