"""Serialisation of sizing, flow and black-start results.

All numbers leaving this module are rounded to `SIGNIFICANT_DIGITS` significant
digits; nothing else is recomputed.
"""

from __future__ import annotations

import json
import logging
import math
import os
import pathlib
from typing import Any, Iterable, Mapping, Sequence

from h2blackstart.blackstart.sequencer import EventRecord
from h2blackstart.blackstart.sim import BlackstartRun, TimeSeries
from h2blackstart.blackstart.sizing import SizingReport
from h2blackstart.domain.constants import ReportFormat
from h2blackstart.grid.netmodel import Network
from h2blackstart.grid.powerflow import NetworkSolution

log = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def significant(value: Any) -> Any:
    """Round floats (recursively inside containers) to the declared output precision."""

    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Mapping):
        return {str(k): significant(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [significant(v) for v in value]
    if hasattr(value, "item"):
        return significant(value.item())
    return value


def sizing_record(report: SizingReport) -> dict[str, Any]:
    losses = report.losses
    return {
        "p_min_mw": report.p_min,
        "q_min_mvar": report.q_min,
        "s_min_mva": report.s_min,
        "margin": report.margin,
        "granularity_mw": report.granularity,
        "rating_mw": report.rating,
        "transformer_excitation_mvar": losses.transformer_excitation_mvar,
        "line_charging_mvar": losses.line_charging_mvar,
        "series_loss_mw": losses.series_loss_mw,
        "series_loss_mvar": losses.series_loss_mvar,
        "lsc_standby_mw": losses.lsc_standby_mw,
        "loads_mw": dict(report.loads),
        "iterations": report.solution.iterations,
    }


def flow_record(solution: NetworkSolution, network: Network) -> dict[str, Any]:
    s_base = solution.s_base
    buses = [
        {
            "name": name,
            "v_pu": float(abs(v)),
            "angle_deg": math.degrees(float(math.atan2(v.imag, v.real))),
            "p_mw": float(s.real) * s_base,
            "q_mvar": float(s.imag) * s_base,
        }
        for name, v, s in zip(network.names, solution.voltages, solution.injections)
    ]
    branches = [
        {
            "name": flow.name,
            "from": network.names[flow.from_bus],
            "to": network.names[flow.to_bus],
            "kind": str(flow.kind),
            "p_from_mw": flow.s_from.real * s_base,
            "q_from_mvar": flow.s_from.imag * s_base,
            "p_to_mw": flow.s_to.real * s_base,
            "q_to_mvar": flow.s_to.imag * s_base,
            "loss_mw": flow.loss.real * s_base,
            "loss_mvar": flow.loss.imag * s_base,
            "shunt_mvar": flow.q_shunt * s_base,
        }
        for flow in solution.branch_flows
    ]
    return {
        "s_base_mva": s_base,
        "iterations": solution.iterations,
        "mismatch": solution.mismatch,
        "loss_mw": solution.loss_total.real * s_base,
        "loss_mvar": solution.loss_total.imag * s_base,
        "buses": buses,
        "branches": branches,
    }


def fault_record(err: Exception, run: BlackstartRun) -> dict[str, Any]:
    """What a failed run reached before it stopped."""

    last = run.series[-1].t if len(run.series) else None
    return {
        "strategy": str(run.strategy),
        "error": type(err).__name__,
        "message": str(err),
        "final_step": run.final_step,
        "t_s": getattr(err, "t", last),
        "last_sample_t_s": last,
        "step_times_s": {str(step): t for step, t in run.step_times.items()},
    }


def format_as_ascii_table(
    rows: Iterable[Sequence[Any]], header: Sequence[str], width: int = 14
) -> str:
    def cell(value: Any) -> str:
        if isinstance(value, float):
            value = f"{value:.{SIGNIFICANT_DIGITS}g}"
        elif value is None:
            value = "-"
        return f"{str(value):{width}}"

    table = "|" + "|".join(cell(h) for h in header) + "|\n"
    table += "+" + "+".join("-" * width for _ in header) + "+\n"
    for row in rows:
        table += "|" + "|".join(cell(v) for v in row) + "|\n"
    return table


def format_as_json(record: Mapping[str, Any]) -> str:
    return json.dumps(significant(record), indent=2, sort_keys=True)


def render_sizing(report: SizingReport, format: ReportFormat = ReportFormat.TABLE) -> str:
    record = sizing_record(report)
    if format == ReportFormat.JSON:
        return format_as_json(record)

    rows = [
        (key, value)
        for key, value in record.items()
        if not isinstance(value, Mapping)
    ]
    rows += [(f"load {name}_mw", value) for name, value in record["loads_mw"].items()]
    return format_as_ascii_table(rows, ("Quantity", "Value"), width=30)


def render_flow(
    solution: NetworkSolution, network: Network, format: ReportFormat = ReportFormat.TABLE
) -> str:
    record = flow_record(solution, network)
    if format == ReportFormat.JSON:
        return format_as_json(record)

    bus_columns = ("name", "v_pu", "angle_deg", "p_mw", "q_mvar")
    branch_columns = (
        "name",
        "from",
        "to",
        "p_from_mw",
        "q_from_mvar",
        "p_to_mw",
        "q_to_mvar",
        "shunt_mvar",
    )
    text = format_as_ascii_table(
        [[bus[c] for c in bus_columns] for bus in record["buses"]], bus_columns
    )
    text += "\n"
    text += format_as_ascii_table(
        [[branch[c] for c in branch_columns] for branch in record["branches"]],
        branch_columns,
    )
    text += "\n"
    text += format_as_ascii_table(
        [
            ("loss_mw", record["loss_mw"]),
            ("loss_mvar", record["loss_mvar"]),
            ("iterations", record["iterations"]),
        ],
        ("Quantity", "Value"),
    )
    return text


def render_summary(summary: Mapping[str, Any], format: ReportFormat = ReportFormat.TABLE) -> str:
    if format == ReportFormat.JSON:
        return format_as_json(summary)

    rows = [(k, v) for k, v in summary.items() if not isinstance(v, Mapping)]
    rows += [
        (f"step {step} at s", t) for step, t in summary.get("step_times_s", {}).items()
    ]
    return format_as_ascii_table(rows, ("Quantity", "Value"), width=30)


def render_comparison(
    summaries: Sequence[Mapping[str, Any]], format: ReportFormat = ReportFormat.TABLE
) -> str:
    if format == ReportFormat.JSON:
        return format_as_json({s["strategy"]: s for s in summaries})

    keys = [
        k
        for k, v in summaries[0].items()
        if k != "strategy" and not isinstance(v, Mapping)
    ]
    rows = [[key] + [s.get(key) for s in summaries] for key in keys]
    header = ["Quantity"] + [str(s["strategy"]).upper() for s in summaries]
    return format_as_ascii_table(rows, header, width=30)


class OutputWriter:
    """Writes run artefacts to files, creating missing parent directories.

    Destinations are always file paths; `-` for stdout is resolved by the caller.
    """

    def write_series(self, series: TimeSeries, path: str | os.PathLike) -> pathlib.Path:
        path = self._prepare(path)
        series.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        log.info(f"wrote {len(series)} samples to {path}")
        return path

    def write_events(
        self, events: Iterable[EventRecord], path: str | os.PathLike
    ) -> pathlib.Path:
        path = self._prepare(path)
        with open(path, "wt", encoding="utf-8") as f:
            for event in events:
                f.write(json.dumps(significant(event.to_dict()), sort_keys=True) + "\n")
        log.info(f"wrote event log to {path}")
        return path

    def write_report(self, content: str, path: str | os.PathLike) -> pathlib.Path:
        path = self._prepare(path)
        with open(path, "wt", encoding="utf-8") as f:
            f.write(content if content.endswith("\n") else content + "\n")
        log.info(f"wrote report to {path}")
        return path

    @staticmethod
    def _prepare(path: str | os.PathLike) -> pathlib.Path:
        path = pathlib.Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path
