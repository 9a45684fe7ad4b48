import json
import logging

import pytest
from click.testing import CliRunner

from h2blackstart.adapters.repository import InMemoryScenarioRepository
from h2blackstart.dependencies import Dependencies
from h2blackstart.domain.exceptions import (
    BlackoutFault,
    BlackstartError,
    ConfigurationError,
    InvalidInputError,
    NonConvergenceError,
    SequencerTimeout,
    SequencingError,
)
from h2blackstart.entrypoints.cli import cli, diagnostic, exit_code
from h2blackstart.log import LOG_FORMAT, LOG_LEVEL, NOISY_LOGGERS
from tests.utils import resource


def invoke(*args: str, obj=None):
    return CliRunner().invoke(cli, list(args), obj=obj)


class TestExitCodes:
    @pytest.mark.parametrize(
        "err, code",
        [
            (BlackoutFault("no source", t=0.1), 6),
            (SequencingError("interlock"), 6),
            (SequencerTimeout("stalled"), 5),
            (NonConvergenceError("diverged", [1.0, 0.5]), 4),
            (ConfigurationError("bad", "$.x"), 3),
            (InvalidInputError("bad"), 3),
            (BlackstartError("other"), 1),
        ],
    )
    def test_exit_code(self, err, code):
        assert exit_code(err) == code

    def test_diagnostic(self):
        err = NonConvergenceError("Power flow diverged", [1.0, 2.0, 4.0])
        err.strategy = "whcc"

        assert diagnostic(err) == "Error: whcc run failed: Power flow diverged after 2 iterations"


class TestCli:
    def test_enable_logging(self):
        invoke("--verbose", "scenarios")
        log = logging.getLogger()

        try:
            assert log.level == LOG_LEVEL
            assert log.handlers[0].formatter._fmt == LOG_FORMAT  # type:ignore
        finally:
            # the handler still writes to the runner's stream
            logging.basicConfig(level=logging.WARNING, force=True)

    def test_solver_traces(self):
        invoke("-vv", "scenarios")

        try:
            for name in NOISY_LOGGERS:
                assert logging.getLogger(name).level == LOG_LEVEL
        finally:
            logging.basicConfig(level=logging.WARNING, force=True)

    def test_validate_config(self):
        result = invoke("--validate", resource("three-bus.yaml"))

        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "Validation successful"

    def test_validate_config_if_config_invalid(self):
        result = invoke("--validate", resource("invalid.yaml"))

        assert result.exit_code == 3
        assert "Validation failed" in result.output

    def test_validate_config_if_bus_unknown(self):
        result = invoke("--validate", resource("unknown-bus.yaml"))

        assert result.exit_code == 3
        assert "$.network.branches[0].to" in result.output

    def test_scenarios(self):
        result = invoke("scenarios")

        assert result.exit_code == 0
        assert "paper-case" in result.output.splitlines()

    def test_scenarios_from_injected_repository(self, paper_case):
        repo = InMemoryScenarioRepository()
        repo.add(paper_case, name="injected")
        result = invoke("scenarios", obj=Dependencies(repository=repo))

        assert result.output.splitlines() == ["injected"]

    def test_size(self):
        result = invoke("size", "paper-case", "--format", "json")
        record = json.loads(result.output)

        assert result.exit_code == 0
        assert record["rating_mw"] == 3.0
        assert record["p_min_mw"] == pytest.approx(2.38, rel=0.05)
        assert record["q_min_mvar"] == pytest.approx(0.91, rel=0.05)

    def test_size_table(self):
        result = invoke("size", "paper-case")

        assert result.exit_code == 0
        assert "rating_mw" in result.output
        assert "2.37" in result.output or "2.38" in result.output

    def test_size_margin(self):
        result = invoke("size", "paper-case", "--margin", "0.5", "--format", "json")

        assert json.loads(result.output)["rating_mw"] == 3.5

    def test_size_to_file(self, tmp_path):
        out = tmp_path / "sizing.json"
        result = invoke("size", "paper-case", "--format", "json", "--out", str(out))

        assert result.exit_code == 0
        assert result.output == ""
        assert json.loads(out.read_text())["rating_mw"] == 3.0

    def test_size_to_stdout(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = invoke("size", "paper-case", "--format", "json", "--out", "-")

        assert result.exit_code == 0
        assert json.loads(result.output)["rating_mw"] == 3.0
        assert not list(tmp_path.iterdir())

    def test_size_without_sizing_section(self):
        result = invoke("size", resource("three-bus.yaml"))

        assert result.exit_code == 3
        assert "$.sizing" in result.output

    def test_unknown_scenario(self):
        result = invoke("size", "no-such-scenario")

        assert result.exit_code == 3
        assert result.output.startswith("Error:")

    def test_flow(self):
        result = invoke("flow", resource("three-bus.yaml"), "--format", "json")
        record = json.loads(result.output)

        assert result.exit_code == 0
        assert [b["name"] for b in record["buses"]] == ["a", "b", "c"]
        assert record["buses"][0]["v_pu"] == 1.02

    def test_blackstart(self, tmp_path):
        result = invoke(
            "blackstart", "paper-case", "--triggers", "scripted", "--out", str(tmp_path)
        )

        assert result.exit_code == 0
        assert "COMPLETE" in result.output
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "whcc-events.jsonl",
            "whcc-summary.json",
            "whcc-timeseries.csv",
        ]
        summary = json.loads((tmp_path / "whcc-summary.json").read_text())
        assert summary["step_times_s"] == {
            "1": 0.0,
            "2": 0.2,
            "3": 0.3,
            "4": 0.5,
            "5": 0.7,
            "6": 1.7,
        }

    def test_blackstart_rerun_is_byte_identical(self, tmp_path):
        for run in ("a", "b"):
            invoke(
                "blackstart",
                "paper-case",
                "--strategy",
                "hscc",
                "--triggers",
                "scripted",
                "--out",
                str(tmp_path / run),
            )

        for name in ("hscc-timeseries.csv", "hscc-events.jsonl", "hscc-summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_blackstart_timeout(self, tmp_path):
        result = invoke(
            "blackstart",
            "paper-case",
            "--triggers",
            "scripted",
            "--t-end",
            "1.0",
            "--out",
            str(tmp_path),
        )

        assert result.exit_code == 5
        assert "Sequence stalled at step 6" in result.output
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "whcc-events.jsonl",
            "whcc-fault.json",
            "whcc-timeseries.csv",
        ]
        record = json.loads((tmp_path / "whcc-fault.json").read_text())
        assert record["error"] == "SequencerTimeout"
        assert record["final_step"] == "6"
        assert record["step_times_s"]["5"] == 0.7

    def test_blackstart_fault_writes_partial_run(self, tmp_path, mocker):
        mocker.patch(
            "h2blackstart.blackstart.sim.solve",
            side_effect=NonConvergenceError("Power flow diverged", [1.0, 2.0]),
        )
        result = invoke("blackstart", "paper-case", "--out", str(tmp_path))
        record = json.loads((tmp_path / "whcc-fault.json").read_text())

        assert result.exit_code == 6
        assert record["error"] == "SimulationFault"
        assert record["t_s"] == 0.0
        assert record["last_sample_t_s"] is None
        assert (tmp_path / "whcc-events.jsonl").read_text().count("start pemfc") == 1

    def test_blackstart_unknown_strategy(self):
        result = invoke("blackstart", "paper-case", "--strategy", "whscc")

        assert result.exit_code == 2

    def test_blackstart_nonpositive_dt(self):
        result = invoke("blackstart", "paper-case", "--dt", "0")

        assert result.exit_code == 2

    def test_compare(self):
        result = invoke("compare", "paper-case", "--triggers", "scripted", "--format", "json")
        record = json.loads(result.output)

        assert result.exit_code == 0
        assert set(record) == {"whcc", "hscc"}
        assert (
            record["hscc"]["max_frequency_deviation_hz"]
            < record["whcc"]["max_frequency_deviation_hz"]
        )

    def test_compare_failure_names_strategy(self):
        result = invoke("compare", "paper-case", "--triggers", "scripted", "--t-end", "0.5")

        assert result.exit_code == 5
        assert "whcc run failed" in result.output
