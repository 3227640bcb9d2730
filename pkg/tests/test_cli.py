"""CLI surface: command wiring, reproducibility, exit codes, output files."""
import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from myobench.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def synth_args(out, classes=2, trials=2, duration=1200, seed=7):
    return ["synth", "--classes", str(classes), "--channels", "2",
            "--trials", str(trials), "--duration-ms", str(duration),
            "--seed", str(seed), "--out", str(out)]


@pytest.fixture()
def dataset_dir(tmp_path, runner):
    out = tmp_path / "data"
    result = runner.invoke(main, synth_args(out))
    assert result.exit_code == 0, result.output
    return out


class TestSynth:
    def test_writes_manifest_and_trials(self, runner, tmp_path):
        out = tmp_path / "d"
        result = runner.invoke(main, synth_args(out, classes=3, trials=2))
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["trials"]) == 6
        for entry in manifest["trials"]:
            assert (out / entry["path"]).exists()
        assert (out / "manifest.json.config.json").exists()

    def test_same_flags_same_bytes(self, runner, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert runner.invoke(main, synth_args(a)).exit_code == 0
        assert runner.invoke(main, synth_args(b)).exit_code == 0
        for path_a in sorted(a.iterdir()):
            path_b = b / path_a.name
            assert path_a.read_text() == path_b.read_text()

    def test_invalid_band_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, synth_args(tmp_path / "d", classes=1)
                               + ["--band", "nonsense"])
        assert result.exit_code == 2

    def test_band_count_mismatch(self, runner, tmp_path):
        result = runner.invoke(main, synth_args(tmp_path / "d", classes=2)
                               + ["--band", "20-100"])
        assert result.exit_code == 2


class TestExtract:
    def test_feature_columns_per_channel(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "features.csv"
        result = runner.invoke(main, [
            "extract", "--data", str(dataset_dir / "manifest.json"),
            "--features", "rms,mmnf", "--window-ms", "256", "--slide-ms", "64",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        with out.open() as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        feature_cols = [c for c in header if ":" in c]
        assert len(feature_cols) == 2 * 2  # 2 features x 2 channels
        # One row per window: 1200 ms trials -> 15 windows each, 4 trials.
        assert len(rows) - 1 == 15 * 4
        assert (tmp_path / "features.csv.config.json").exists()

    def test_unknown_feature_is_usage_error(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, [
            "extract", "--data", str(dataset_dir / "manifest.json"),
            "--features", "glitter", "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2
        assert "valid names" in result.output

    def test_missing_dataset_is_runtime_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "extract", "--data", str(tmp_path / "no.json"),
            "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 1


class TestRobustness:
    def test_default_panel_covers_the_representatives(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "grid"
        result = runner.invoke(main, [
            "robustness", "--data", str(dataset_dir / "manifest.json"),
            "--snr", "20,10", "--reps", "2", "--seed", "1",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        with (tmp_path / "grid.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert {r["feature"] for r in rows} == {
            "rms", "zc", "wamp", "ssc", "hemg", "ar", "mnf", "mdf", "mmnf", "mmdf"}
        payload = json.loads((tmp_path / "grid.json").read_text())
        assert payload["config"]["snr_grid_db"] == [20.0, 10.0]

    def test_cell_counting(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, [
            "robustness", "--data", str(dataset_dir / "manifest.json"),
            "--features", "rms", "--snr", "20,15,10,5,3,0", "--reps", "10",
            "--out", str(tmp_path / "g")])
        assert result.exit_code == 0, result.output
        with (tmp_path / "g.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        # 2 trials x 2 channels = 4 records per motion, 10 reps each:
        # 8 records x 6 SNRs x 10 reps = 480 PE samples over 12 cells.
        assert len(rows) == 2 * 6
        assert sum(int(r["n"]) for r in rows) == 8 * 6 * 10

    def test_sweep_slices(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, [
            "robustness", "--data", str(dataset_dir / "manifest.json"),
            "--sweep", "wamp:threshold=10..50:10", "--snr", "20", "--reps", "1",
            "--out", str(tmp_path / "s")])
        assert result.exit_code == 0, result.output
        with (tmp_path / "s.csv").open() as fh:
            params = {r["parameters"] for r in csv.DictReader(fh)}
        assert params == {"threshold=10", "threshold=20", "threshold=30",
                          "threshold=40", "threshold=50"}

    def test_bad_sweep_is_usage_error(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, [
            "robustness", "--data", str(dataset_dir / "manifest.json"),
            "--sweep", "wamp=threshold", "--out", str(tmp_path / "s")])
        assert result.exit_code == 2


class TestClassify:
    def test_table_shape_and_outputs(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "clf"
        result = runner.invoke(main, [
            "classify", "--data", str(dataset_dir / "manifest.json"),
            "--sets", "hudgins,oskoei,robust", "--noise", "clean,20,15,10",
            "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        with Path(f"{out}_table.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["feature_set", "clean", "20dB", "15dB", "10dB"]
        assert [r[0] for r in rows[1:]] == ["hudgins", "oskoei", "robust"]
        assert len(rows[1:]) * (len(rows[0]) - 1) == 12
        robust_clean = float(rows[3][1])
        assert robust_clean >= 95.0
        report = json.loads(Path(f"{out}_report.json").read_text())
        assert report["config"]["seed"] == 3
        assert len(report["cells"]) == 12
        decisions = list(tmp_path.glob("clf_decisions_*.csv"))
        assert len(decisions) == 12
        with decisions[0].open() as fh:
            header = next(csv.reader(fh))
        assert header == ["window_start_ms", "true_label", "raw_label", "mv_label"]

    def test_seven_row_table(self, runner, dataset_dir, tmp_path):
        # Four single-feature sets plus the three multi-feature sets.
        out = tmp_path / "full"
        result = runner.invoke(main, [
            "classify", "--data", str(dataset_dir / "manifest.json"),
            "--sets", "hemg1=hemg,wl1=wl,wamp1=wamp,mmnf1=mmnf,"
                      "hudgins,oskoei,robust",
            "--noise", "clean,20,15,10", "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads(Path(f"{out}_report.json").read_text())
        assert len(report["sets"]) == 7
        assert len(report["cells"]) == 28

    def test_missing_dataset_path(self, runner, tmp_path):
        result = runner.invoke(main, [
            "classify", "--data", str(tmp_path / "ghost.json"),
            "--out", str(tmp_path / "c")])
        assert result.exit_code == 1

    def test_unknown_set_is_usage_error(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, [
            "classify", "--data", str(dataset_dir / "manifest.json"),
            "--sets", "imaginary", "--out", str(tmp_path / "c")])
        assert result.exit_code == 2
