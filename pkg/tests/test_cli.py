"""Tests for the command-line interface."""

import csv
import io

import pytest
from typer.testing import CliRunner

from src import __version__
from src.cli import app

runner = CliRunner()


@pytest.fixture
def config_file(tmp_path, config_yaml):
    path = tmp_path / "experiment.yaml"
    path.write_text(config_yaml, encoding="utf-8")
    return path


class TestCalibrate:
    def test_prints_thresholds(self):
        result = runner.invoke(app, ["calibrate", "--alpha", "0.05", "--beta", "0.01", "--k", "1"])
        assert result.exit_code == 0
        assert result.stdout.strip() == "A=4.605170186 B=2.995732274"

    def test_invalid_alpha(self):
        result = runner.invoke(app, ["calibrate", "--alpha", "1.5", "--beta", "0.01", "--k", "2"])
        assert result.exit_code == 2

    def test_invalid_k(self):
        result = runner.invoke(app, ["calibrate", "--alpha", "0.05", "--beta", "0.01", "--k", "0"])
        assert result.exit_code == 2


class TestRun:
    def test_writes_csv(self, tmp_path, config_file):
        out = tmp_path / "results.csv"
        result = runner.invoke(app, ["run", "--config", str(config_file), "--out", str(out)])
        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
        # H0 plus subsets {1}, {2} and {1, 2}
        assert [row["subset"] for row in rows] == ["none", "1", "2", "1-2"]
        assert {row["strategy"] for row in rows} == {"decentralized_one_bit"}

    def test_byte_identical_reruns(self, tmp_path, config_file):
        outputs = []
        for name in ("first.csv", "second.csv"):
            out = tmp_path / name
            runner.invoke(app, ["run", "-c", str(config_file), "-o", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_csv_on_stdout(self, config_file):
        result = runner.invoke(app, ["run", "--config", str(config_file)])
        assert result.exit_code == 0
        assert result.stdout.startswith("hypothesis,subset,strategy,")

    def test_invalid_config(self, tmp_path, config_yaml):
        path = tmp_path / "bad.yaml"
        path.write_text(config_yaml.replace("alpha: 0.05", "alpha: 2"), encoding="utf-8")
        result = runner.invoke(app, ["run", "--config", str(path)])
        assert result.exit_code == 2

    def test_model_kind_not_a_name(self, tmp_path, config_yaml):
        path = tmp_path / "bad.yaml"
        path.write_text(
            config_yaml.replace("kind: gaussian_mean_shift", "kind: [gaussian_mean_shift]"),
            encoding="utf-8",
        )
        result = runner.invoke(app, ["run", "--config", str(path)])
        assert result.exit_code == 2

    def test_missing_config(self, tmp_path):
        result = runner.invoke(app, ["run", "--config", str(tmp_path / "absent.yaml")])
        assert result.exit_code == 2

    def test_bad_worker_override(self, config_file):
        result = runner.invoke(app, ["run", "--config", str(config_file), "--workers", "0"])
        assert result.exit_code == 2

    def test_unwritable_output(self, tmp_path, config_file):
        out = tmp_path / "missing" / "results.csv"
        result = runner.invoke(app, ["run", "--config", str(config_file), "--out", str(out)])
        assert result.exit_code == 1

    def test_unexpected_error(self, monkeypatch, config_file):
        def fail(*args, **kwargs):
            raise RuntimeError("worker crashed")

        monkeypatch.setattr("src.cli.experiment.run_experiment", fail)
        result = runner.invoke(app, ["run", "--config", str(config_file)])
        assert result.exit_code == 1


class TestSweepDelta:
    def test_rows_per_step(self, tmp_path, config_file):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            app,
            ["sweep-delta", "-c", str(config_file), "--deltas", "0.5,2", "-o", str(out)],
        )
        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
        assert len(rows) == 8
        assert rows[0]["strategy"] == "decentralized_one_bit@delta=0.5"
        assert rows[-1]["strategy"] == "decentralized_one_bit@delta=2"

    def test_bad_deltas(self, config_file):
        result = runner.invoke(app, ["sweep-delta", "-c", str(config_file), "--deltas", "1,x"])
        assert result.exit_code == 2


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"seqfusion version {__version__}" in result.output
