"""
Contains tests for the command-line front end and the runner behind it.
"""
import json
import os

import pytest
from click.testing import CliRunner

from nlsignal import runner
from nlsignal.cli import main
from nlsignal.configurations import SCENARIO_PRESETS, Scenario, load
from nlsignal.exceptions import QuadratureNonConvergence, SweepFailure

HEADER = "ell,s2_local,s2_ell,s2_total,correction,oracle_value,oracle_error"


def invoke(*args: str):
    return CliRunner().invoke(main, ["--workers", "1", *args])


def read_summary(out_dir) -> dict:
    with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as file:
        return json.load(file)


class TestDegenerateRatio:
    def test_passes_near_zero_gap(self, tmp_path):
        out = tmp_path / "out"
        result = invoke("--scenario", "DegenerateRatio", "--out", str(out))

        assert result.exit_code == 0
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 2
        assert lines[1].split(",")[-2:] == ["nan", "nan"]

        summary = read_summary(out)
        assert summary["scenario"] == "DegenerateRatio"
        assert summary["parameters"]["omega"] == 1e-6
        assert [check["name"] for check in summary["checks"]] == ["degenerate_ratio"]
        assert summary["checks"][0]["pass"] is True
        assert summary["details"]["ratios"][0]["expected"] == pytest.approx(
            2 * (0.07 / 7) ** 2 * 9 / 2
        )

    def test_fails_check_at_finite_gap(self, tmp_path):
        out = tmp_path / "out"
        result = invoke("--scenario", "DegenerateRatio", "--omega", "1", "--out", str(out))

        assert result.exit_code == 3
        assert read_summary(out)["checks"][0]["pass"] is False


class TestInvalidInput:
    def test_reversed_window(self, tmp_path):
        out = tmp_path / "out"
        result = invoke("--scenario", "Fig3", "--a", "9", "--b", "8", "--out", str(out))
        assert result.exit_code == 1
        assert not out.exists()

    def test_scenario_or_config_required(self, tmp_path):
        assert invoke("--out", str(tmp_path)).exit_code == 1

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "bad.cfg"
        config.write_text("scenario = Fig3\nmass = 1.0\n")
        assert invoke("--config", str(config), "--out", str(tmp_path / "out")).exit_code == 1

    def test_conflicting_scenario(self, tmp_path):
        config = tmp_path / "narrow.cfg"
        config.write_text("scenario = Fig3\n")
        result = invoke("--config", str(config), "--scenario", "Timelike", "--dry-run")
        assert result.exit_code == 1

    def test_bob_before_alice_closes(self, tmp_path):
        result = invoke(
            "--scenario", "LightbandDelta", "--tau", "1.5", "--out", str(tmp_path / "out")
        )
        assert result.exit_code == 1

    def test_unknown_scenario(self):
        result = invoke("--scenario", "Fig4")
        assert result.exit_code == 1
        assert "Fig4" in result.output

    def test_malformed_number(self):
        assert invoke("--scenario", "Fig3", "--omega", "fast").exit_code == 1

    def test_invalid_worker_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NLSIGNAL_WORKERS", "none")
        result = CliRunner().invoke(main, ["--scenario", "Fig3", "--dry-run"])
        assert result.exit_code == 1


class TestDryRun:
    def test_writes_nothing(self, tmp_path):
        out = tmp_path / "out"
        result = invoke("--scenario", "Fig3", "--out", str(out), "--dry-run")
        assert result.exit_code == 0
        assert not out.exists()

    def test_dump_config_round_trips(self, tmp_path):
        path = tmp_path / "resolved.cfg"
        result = invoke(
            "--scenario", "Fig3", "--b", "8.2", "--ell-count", "40", "--oracle",
            "--dump-config", str(path), "--dry-run",
        )
        assert result.exit_code == 0

        spec = load(str(path))
        assert spec == SCENARIO_PRESETS[Scenario.FIG3].with_overrides(
            b=8.2, ell_count=40, oracle_check=True
        )

    def test_config_with_overrides(self, tmp_path):
        config = tmp_path / "timelike.cfg"
        config.write_text("scenario = Timelike\ntau = 10.0\n")
        path = tmp_path / "resolved.cfg"
        result = invoke(
            "--config", str(config), "--tau", "11", "--dump-config", str(path), "--dry-run"
        )
        assert result.exit_code == 0
        assert load(str(path)).parameter("tau") == 11.0


class TestExitCodes:
    def test_nonconvergence(self, tmp_path, monkeypatch):
        def diverging(*args, **kwargs):
            raise QuadratureNonConvergence(0.0, 1.0, 10_000, "evaluation budget exhausted")

        monkeypatch.setattr(runner, "sweep", diverging)
        result = invoke("--scenario", "LightbandDelta", "--out", str(tmp_path))
        assert result.exit_code == 2

    def test_nonconvergence_inside_sweep_failure(self, tmp_path, monkeypatch):
        def failing(*args, **kwargs):
            raise SweepFailure([QuadratureNonConvergence(0.0, 1.0, 10, "budget")])

        monkeypatch.setattr(runner, "sweep", failing)
        factory = SCENARIO_PRESETS[Scenario.LIGHTBAND_DELTA].with_overrides
        assert runner.execute(factory, str(tmp_path), workers=1) == runner.EXIT_NONCONVERGENCE

    def test_unexpected_errors_propagate(self, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise KeyError("bug")

        monkeypatch.setattr(runner, "sweep", broken)
        factory = SCENARIO_PRESETS[Scenario.LIGHTBAND_DELTA].with_overrides
        with pytest.raises(KeyError):
            runner.execute(factory, str(tmp_path), workers=1)


def test_table_is_deterministic(tmp_path):
    tables = []
    for name in ("first", "second"):
        out = tmp_path / name
        invoke("--scenario", "LightbandDelta", "--ell-count", "5", "--out", str(out))
        tables.append((out / "results.csv").read_bytes())
    assert tables[0] == tables[1]
    assert tables[0].decode().splitlines()[0] == HEADER


def test_timelike_has_no_local_signal(tmp_path):
    out = tmp_path / "out"
    assert invoke("--scenario", "Timelike", "--ell-count", "6", "--out", str(out)).exit_code == 0
    checks = {check["name"]: check for check in read_summary(out)["checks"]}
    assert checks["local_vanishes"]["pass"] is True
    assert read_summary(out)["fit"]["model"] == "ExpInvSq"


@pytest.mark.slow
def test_narrow_window_scenario(tmp_path):
    out = tmp_path / "out"
    result = invoke("--scenario", "Fig3", "--out", str(out))

    assert result.exit_code == 0
    summary = read_summary(out)
    assert summary["classification"] == "Polynomial(2)"
    assert summary["fit"]["exponent"] == pytest.approx(2.0, abs=0.05)
    assert len((out / "results.csv").read_text().splitlines()) == 21


@pytest.mark.slow
def test_oracle_agreement(tmp_path):
    out = tmp_path / "out"
    result = invoke(
        "--scenario", "LightbandDelta", "--ell-count", "3", "--oracle", "--out", str(out)
    )

    assert result.exit_code in (0, 3)
    checks = {check["name"]: check for check in read_summary(out)["checks"]}
    assert checks["oracle_agreement"]["pass"] is True
    first_row = (out / "results.csv").read_text().splitlines()[1].split(",")
    assert first_row[-2] != "nan"


@pytest.mark.parametrize("scenario", ["Timelike", "TimelikeSuppression"])
def test_timelike_scenarios_classify_exponential(tmp_path, scenario):
    out = tmp_path / "out"
    result = invoke("--scenario", scenario, "--out", str(out))

    assert result.exit_code == 0
    summary = read_summary(out)
    assert summary["classification"] == "Exponential"
    assert summary["fit"]["model"] == "ExpInvSq"
    assert summary["fit"]["r_squared"] >= 0.999
    assert all(check["pass"] for check in summary["checks"])


@pytest.mark.parametrize("scenario", ["LightbandDelta", "LightbandExtended", "LocalLimit"])
def test_lightband_scenarios_classify_quadratic(tmp_path, scenario):
    out = tmp_path / "out"
    result = invoke("--scenario", scenario, "--out", str(out))

    assert result.exit_code == 0
    summary = read_summary(out)
    assert summary["classification"] == "Polynomial(2)"
    assert summary["fit"]["exponent"] == pytest.approx(2.0, abs=0.1)
    assert summary["details"]["leading_residual_exponent"] == pytest.approx(4.0, abs=0.3)
