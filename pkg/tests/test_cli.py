import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from gsplab.cli import main

TINY = ["--override", "n_chains=9", "--override", "n_iterations=2",
        "--override", "n_random=2", "--override", 'novel_sentences=["n1"]']


@pytest.fixture
def runner():
    return CliRunner()


def simulate(runner, out, extra=()):
    args = ["simulate", "--out", str(out), "--seed", "17",
            "--skip-ratings", *TINY, *extra]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    return out / "events.jsonl", out / "summary.json"


class TestSimulate:
    def test_emits_artifacts(self, runner, tmp_path):
        log, summary = simulate(runner, tmp_path / "run")
        assert log.exists() and summary.exists()
        s = json.loads(summary.read_text())
        assert s["reason"] == "all-complete"
        assert s["full_chains"] == 9

    def test_idempotent_reruns_byte_identical(self, runner, tmp_path):
        log, summary = simulate(runner, tmp_path / "run")
        first = (log.read_bytes(), summary.read_bytes())
        log2, summary2 = simulate(runner, tmp_path / "run")
        assert (log2.read_bytes(), summary2.read_bytes()) == first

    def test_scenario_file(self, runner, tmp_path):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps(
            {"policy": {"mode": "sampler", "temperature": 0.2}}))
        log, summary = simulate(runner, tmp_path / "run",
                                ["--scenario", str(scenario)])
        assert json.loads(summary.read_text())["full_chains"] == 9

    def test_config_error_exit_2(self, runner, tmp_path):
        res = runner.invoke(main, [
            "simulate", "--out", str(tmp_path / "x"),
            "--override", "participants_per_iteration=4"])
        assert res.exit_code == 2
        assert "error" in res.output


class TestValidateAnalyze:
    def test_validate_then_analyze_full_bundle(self, runner, tmp_path):
        log, _ = simulate(runner, tmp_path / "run")
        res = runner.invoke(main, ["validate", "--log", str(log)])
        assert res.exit_code == 0, res.output
        assert "validation set built" in res.output
        # second call is a no-op
        res2 = runner.invoke(main, ["validate", "--log", str(log)])
        assert "already built" in res2.output

        # drive the rating phase via the library so analyze has data
        from gsplab.agents import default_targets
        from gsplab.config import config_from_dict
        from gsplab.events import EventLog
        from gsplab.experiment import Experiment
        from gsplab.simulate import _run_rating_phase
        exp = Experiment(None, EventLog(log))
        # validation exists: only the rating loop runs
        from gsplab.agents import rating_agent
        targets = default_targets(exp.config)
        _run_rating_phase(exp, targets, 0.25, 0.0)
        exp.log.close()

        out = tmp_path / "report"
        res = runner.invoke(main, ["analyze", "--log", str(log),
                                   "--out", str(out)])
        assert res.exit_code == 0, res.output
        text = (out / "report.txt").read_text()
        for section in ("[contrast]", "[pca]", "[features]",
                        "[classification]"):
            assert section in text
        for name in ("contrast.csv", "contrast.png", "pca_scores.csv",
                     "pca.png", "features.csv", "uar.csv", "summary.json"):
            assert (out / name).exists()

    def test_corrupt_log_exit_4(self, runner, tmp_path):
        log, _ = simulate(runner, tmp_path / "run")
        raw = log.read_text().splitlines()
        raw[3] = raw[3].replace(':', ';', 1)
        log.write_text("\n".join(raw) + "\n")
        res = runner.invoke(main, ["export", "--log", str(log)])
        assert res.exit_code == 4
        res = runner.invoke(main, ["analyze", "--log", str(log),
                                   "--out", str(tmp_path / "r")])
        assert res.exit_code == 4

    def test_validate_without_full_chains_exit_3(self, runner, tmp_path):
        out = tmp_path / "run"
        res = runner.invoke(main, [
            "simulate", "--out", str(out), "--skip-ratings", *TINY,
            "--override", "duration_hours=1e-9"])
        assert res.exit_code == 0
        res = runner.invoke(main, ["validate", "--log",
                                   str(out / "events.jsonl")])
        assert res.exit_code == 3


class TestRender:
    def test_default_point_matches_explicit_origin(self, runner, tmp_path):
        a, b = tmp_path / "a.wav", tmp_path / "b.wav"
        r1 = runner.invoke(main, ["render", "--out", str(a)])
        r2 = runner.invoke(main, ["render", "--out", str(b), "--indices",
                                  ",".join(["12"] * 10)])
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_wrong_arity_exit_3(self, runner, tmp_path):
        res = runner.invoke(main, ["render", "--out",
                                   str(tmp_path / "x.wav"),
                                   "--indices", "1,2,3"])
        assert res.exit_code == 3

    def test_unknown_sentence_exit_3(self, runner, tmp_path):
        res = runner.invoke(main, ["render", "--out",
                                   str(tmp_path / "x.wav"),
                                   "--sentence", "zz"])
        assert res.exit_code == 3


class TestExport:
    def test_stdout_matches_file(self, runner, tmp_path):
        log, _ = simulate(runner, tmp_path / "run")
        to_stdout = runner.invoke(main, ["export", "--log", str(log)])
        dest = tmp_path / "copy.jsonl"
        runner.invoke(main, ["export", "--log", str(log),
                             "--out", str(dest)])
        assert to_stdout.output.strip().splitlines() == \
            dest.read_text().strip().splitlines()
        assert dest.read_text() == log.read_text()
