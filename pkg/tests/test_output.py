import json
import math

import numpy as np
import pandas as pd
import pytest

from h2blackstart.adapters.output import (
    OutputWriter,
    fault_record,
    flow_record,
    format_as_ascii_table,
    format_as_json,
    render_comparison,
    render_flow,
    render_sizing,
    render_summary,
    significant,
    sizing_record,
)
from h2blackstart.blackstart.sequencer import EventRecord, SequencerState
from h2blackstart.blackstart.sim import BlackstartRun, Sample, TimeSeries
from h2blackstart.domain.constants import ReportFormat, Strategy
from h2blackstart.domain.exceptions import SequencerTimeout, SimulationFault
from h2blackstart.grid.powerflow import solve
from tests.utils import three_bus

expected_table = """|a    |b    |
+-----+-----+
|x    |1.5  |
|y    |-    |
"""


class TestSignificant:
    def test_float(self):
        assert significant(2.379512345) == 2.37951
        assert significant(1e-9 / 3) == 3.33333e-10

    def test_non_finite(self):
        assert significant(math.nan) is None
        assert significant(math.inf) is None

    def test_nested(self):
        value = {"a": [1.23456789, (2.0, "x")], 3: np.float64(0.1234567)}

        assert significant(value) == {"a": [1.23457, [2.0, "x"]], "3": 0.123457}

    def test_passthrough(self):
        assert significant(True) is True
        assert significant(None) is None
        assert significant(7) == 7
        assert significant(np.int64(7)) == 7


class TestFormatting:
    def test_ascii_table(self):
        assert format_as_ascii_table([("x", 1.5), ("y", None)], ("a", "b"), width=5) == (
            expected_table
        )

    def test_json_is_sorted_and_rounded(self):
        text = format_as_json({"b": 1.0000001, "a": 2})

        assert json.loads(text) == {"a": 2, "b": 1.0}
        assert text.index('"a"') < text.index('"b"')


class TestRecords:
    def test_sizing_record(self, paper_sizing):
        record = sizing_record(paper_sizing)

        assert record["rating_mw"] == 3.0
        assert record["p_min_mw"] == paper_sizing.p_min
        assert set(record["loads_mw"]) == {"wind_aux", "lsc_standby", "hydrogen_aux"}

    def test_render_sizing(self, paper_sizing):
        table = render_sizing(paper_sizing)
        record = json.loads(render_sizing(paper_sizing, ReportFormat.JSON))

        assert "rating_mw" in table
        assert "load hydrogen_aux_mw" in table
        assert record["rating_mw"] == 3.0
        assert record["p_min_mw"] == pytest.approx(2.38, rel=0.05)

    def test_flow_record(self):
        network = three_bus()
        solution = solve(network)
        record = flow_record(solution, network)

        assert [b["name"] for b in record["buses"]] == ["slack", "gen", "load"]
        assert record["buses"][0]["v_pu"] == pytest.approx(1.02)
        assert record["buses"][2]["p_mw"] == pytest.approx(-0.9, abs=1e-8)
        assert record["branches"][1]["kind"] == "transformer"
        assert record["loss_mw"] == pytest.approx(
            sum(b["loss_mw"] for b in record["branches"])
        )

    def test_render_flow(self):
        network = three_bus()
        text = render_flow(solve(network), network)

        assert "angle_deg" in text
        assert "t02" in text
        assert "iterations" in text

    def test_render_summary(self, whcc_run):
        summary = whcc_run.summary()
        text = render_summary(summary)
        record = json.loads(render_summary(summary, ReportFormat.JSON))

        assert "step 6 at s" in text
        assert record["final_step"] == "COMPLETE"
        assert record["step_times_s"]["1"] == 0.0

    def test_render_comparison(self, whcc_run, hscc_run):
        summaries = [whcc_run.summary(), hscc_run.summary()]
        text = render_comparison(summaries)
        record = json.loads(render_comparison(summaries, ReportFormat.JSON))

        assert text.splitlines()[0].split("|")[2].strip() == "WHCC"
        assert "max_frequency_deviation_hz" in text
        assert set(record) == {"whcc", "hscc"}

    @pytest.mark.parametrize(
        "err, t_s",
        [(SimulationFault("diverged", t=0.4), 0.4), (SequencerTimeout("stalled"), 0.001)],
    )
    def test_fault_record(self, err, t_s):
        series = TimeSeries(bus_names=())
        series.append(Sample(t=0.0))
        series.append(Sample(t=0.001))
        events = (EventRecord(t=0.0, step=1, kind="step"),)
        run = BlackstartRun(Strategy.HSCC, series, events, SequencerState(Strategy.HSCC, step=2))
        record = fault_record(err, run)

        assert record["strategy"] == "hscc"
        assert record["error"] == type(err).__name__
        assert record["final_step"] == "2"
        assert record["t_s"] == t_s
        assert record["last_sample_t_s"] == 0.001
        assert record["step_times_s"] == {"1": 0.0}

    def test_fault_record_without_samples(self):
        run = BlackstartRun(
            Strategy.WHCC, TimeSeries(bus_names=()), (), SequencerState(Strategy.WHCC)
        )
        record = fault_record(SequencerTimeout("stalled"), run)

        assert record["t_s"] is None
        assert record["final_step"] == "1"


class TestOutputWriter:
    def series(self) -> TimeSeries:
        series = TimeSeries(bus_names=("a",))
        series.append(Sample(t=0.0, voltages=(1.0,), pemfc=complex(0.123456789, 0.0)))
        series.append(Sample(t=0.001, v_dc=1150.0, voltages=(0.99,)))
        return series

    def test_write_series(self, tmp_path):
        path = OutputWriter().write_series(self.series(), tmp_path / "out" / "series.csv")
        frame = pd.read_csv(path)

        assert list(frame.columns) == self.series().columns
        assert frame["pemfc_p"].iloc[0] == 0.123457
        assert np.isnan(frame["v_dc"].iloc[0])
        assert frame["v_dc"].iloc[1] == 1150.0

    def test_write_events(self, tmp_path):
        events = [
            EventRecord(t=0.0, step=1, kind="step", actions=("start pemfc",)),
            EventRecord(t=0.2, step=2, kind="step", snapshot={"f_hz": 49.99999999}),
        ]
        path = OutputWriter().write_events(events, tmp_path / "events.jsonl")
        lines = [json.loads(line) for line in path.read_text().splitlines()]

        assert len(lines) == 2
        assert lines[0]["actions"] == ["start pemfc"]
        assert lines[1]["snapshot"] == {"f_hz": 50.0}

    def test_write_report(self, tmp_path):
        path = OutputWriter().write_report("text", tmp_path / "report.txt")

        assert path.read_text() == "text\n"

    def test_rewrite_is_byte_identical(self, tmp_path):
        writer = OutputWriter()
        first = writer.write_series(self.series(), tmp_path / "a.csv")
        second = writer.write_series(self.series(), tmp_path / "b.csv")

        assert first.read_bytes() == second.read_bytes()
