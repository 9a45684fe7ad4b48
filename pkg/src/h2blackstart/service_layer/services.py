import logging
import os
import pathlib
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from h2blackstart.adapters.output import (
    OutputWriter,
    fault_record,
    format_as_json,
    sizing_record,
)
from h2blackstart.adapters.repository import AbstractScenarioRepository
from h2blackstart.blackstart import sim, sizing
from h2blackstart.blackstart.sim import BlackstartRun
from h2blackstart.blackstart.sizing import SizingReport
from h2blackstart.domain.constants import Strategy, TriggerMode
from h2blackstart.domain.exceptions import (
    BlackstartError,
    ConfigurationError,
    InvalidInputError,
)
from h2blackstart.domain.model import Scenario
from h2blackstart.grid import powerflow
from h2blackstart.grid.netmodel import Network
from h2blackstart.grid.powerflow import NetworkSolution

log = logging.getLogger(__name__)


def load_scenario(reference: str, repository: AbstractScenarioRepository) -> Scenario:
    return repository.get(reference)


def size(scenario: Scenario, margin: float | None = None) -> SizingReport:
    report = sizing.size(
        scenario.require_sizing(), margin=margin, options=scenario.options.flow
    )

    if scenario.calibration is not None:
        computed = {
            k: v for k, v in sizing_record(report).items() if isinstance(v, float)
        }
        if margin is not None:
            # the rating target only holds for the calibrated margin
            computed.pop("rating_mw", None)
        for key, (value, target) in scenario.calibration.misses(computed).items():
            log.warning(
                f"{scenario.name}: {key} = {value:.4g} misses calibration target "
                f"{target:.4g} by more than {scenario.calibration.tolerance:.0%}"
            )

    return report


def flow(scenario: Scenario) -> tuple[NetworkSolution, Network]:
    """Solve the scenario network, loaded with the sizing demand when the scenario sizes."""

    if scenario.sizing is not None:
        network = sizing.build_blackstart_network(scenario.sizing)
    else:
        network = scenario.network
    return powerflow.solve(network, scenario.options.flow), network


def blackstart(
    scenario: Scenario,
    strategy: Strategy,
    trigger_mode: TriggerMode | None = None,
    dt: float | None = None,
    t_end: float | None = None,
) -> BlackstartRun:
    options = scenario.sim_options(trigger_mode=trigger_mode, dt=dt, t_end=t_end)
    try:
        return sim.run_blackstart(scenario.blackstart(), strategy, options)
    except BlackstartError as err:
        log.error(f"{scenario.name}: {strategy} run failed: {err}")
        raise


def consistency(run: BlackstartRun, report: SizingReport) -> dict[str, float | None]:
    try:
        p_error, q_error = sim.static_dynamic_errors(run, report.p_min, report.q_min)
    except InvalidInputError:
        log.warning(f"{run.strategy}: no steps 1-5 plateau to compare with sizing")
        return {"static_dynamic_p_error": None, "static_dynamic_q_error": None}
    return {"static_dynamic_p_error": p_error, "static_dynamic_q_error": q_error}


def summarize(scenario: Scenario, run: BlackstartRun) -> dict[str, Any]:
    summary = run.summary()
    summary["scenario"] = scenario.name
    summary.update(consistency(run, size(scenario)))
    return summary


def compare(
    scenario: Scenario,
    trigger_mode: TriggerMode | None = None,
    dt: float | None = None,
    t_end: float | None = None,
) -> list[dict[str, Any]]:
    """Run WHCC and HSCC concurrently on the same scenario; one summary per strategy."""

    if not scenario.disconnect_pemfc:
        raise ConfigurationError(
            "WHCC never hands frequency control from the PEMFC to the DFIG "
            "when the PEMFC stays connected; nothing to compare",
            "$.sequence.disconnect_pemfc",
        )

    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = {
            strategy: pool.submit(blackstart, scenario, strategy, trigger_mode, dt, t_end)
            for strategy in (Strategy.WHCC, Strategy.HSCC)
        }
        runs = {}
        for strategy, future in futures.items():
            try:
                runs[strategy] = future.result()
            except BlackstartError as err:
                err.strategy = str(strategy)
                raise

    return [summarize(scenario, run) for run in runs.values()]


def write_run(
    scenario: Scenario,
    run: BlackstartRun,
    out_dir: str | os.PathLike,
    writer: OutputWriter,
    report: str | None = None,
) -> list[pathlib.Path]:
    out_dir = pathlib.Path(out_dir)
    prefix = str(run.strategy)

    paths = [
        writer.write_series(run.series, out_dir / f"{prefix}-timeseries.csv"),
        writer.write_events(run.events, out_dir / f"{prefix}-events.jsonl"),
    ]
    if report is not None:
        paths.append(writer.write_report(report, out_dir / f"{prefix}-summary.json"))
    log.info(f"{scenario.name}: wrote {len(paths)} files to {out_dir}")
    return paths


def write_fault(
    scenario: Scenario,
    err: BlackstartError,
    out_dir: str | os.PathLike,
    writer: OutputWriter,
) -> list[pathlib.Path]:
    """Write the series and events a failed run recorded, plus a fault record."""

    if err.run is None:
        return []

    run = err.run
    paths = write_run(scenario, run, out_dir, writer)
    paths.append(
        writer.write_report(
            format_as_json(fault_record(err, run)),
            pathlib.Path(out_dir) / f"{run.strategy}-fault.json",
        )
    )
    log.warning(f"{scenario.name}: {run.strategy} stopped at step {run.final_step}")
    return paths
