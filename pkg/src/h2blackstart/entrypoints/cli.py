import pathlib
from functools import wraps

import click

from h2blackstart import __version__
from h2blackstart.adapters.output import (
    render_comparison,
    render_flow,
    render_sizing,
    render_summary,
)
from h2blackstart.config.config import Config
from h2blackstart.dependencies import Dependencies
from h2blackstart.domain.constants import ReportFormat, Strategy, TriggerMode
from h2blackstart.domain.exceptions import (
    BlackstartError,
    InvalidInputError,
    NonConvergenceError,
    ScenarioError,
    SequencerTimeout,
    SequencingError,
    SimulationFault,
)
from h2blackstart.log import create_logger
from h2blackstart.service_layer import services

# first match wins; subclasses before their bases
EXIT_CODES: tuple[tuple[type[Exception], int], ...] = (
    (SimulationFault, 6),
    (SequencingError, 6),
    (SequencerTimeout, 5),
    (NonConvergenceError, 4),
    (ScenarioError, 3),
    (InvalidInputError, 3),
    (BlackstartError, 1),
)


def exit_code(err: Exception) -> int:
    return next((code for cls, code in EXIT_CODES if isinstance(err, cls)), 1)


def diagnostic(err: Exception) -> str:
    message = str(err)
    strategy = getattr(err, "strategy", None)
    if strategy:
        message = f"{strategy} run failed: {message}"
    if isinstance(err, NonConvergenceError):
        message += f" after {err.iterations} iterations"
    return f"Error: {message}"


def reports_errors(func):
    """Decorator that turns library errors into a one-line diagnostic and an exit code."""

    @wraps(func)
    def new_func(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BlackstartError as err:
            click.echo(diagnostic(err), err=True)
            click.get_current_context().exit(exit_code(err))

    return new_func


def enable_logging(ctx: click.Context, _, verbosity: int):
    """Callback that enables logging; a second `-v` adds power-flow iteration traces."""

    if verbosity:
        create_logger(trace_solver=verbosity > 1)


def validate_config(ctx: click.Context, _, filepath: str):
    """Callback that validates a scenario file."""

    if not filepath:
        return

    try:
        config = Config.read(filepath)
        ok, err = config.validate()
        if ok:
            config.parse()
    except ScenarioError as error:
        ok, err = False, str(error)

    if not ok:
        click.echo(f"Validation failed: {err}", err=True)
        ctx.exit(3)

    click.echo("Validation successful")
    ctx.exit()


def emit(text: str, destination: str | None, deps: Dependencies):
    if destination in (None, "-"):
        click.echo(text)
    else:
        deps.writer.write_report(text, destination)


format_option = click.option(
    "--format",
    "format",
    default=str(ReportFormat.TABLE),
    type=click.Choice(ReportFormat.values()),
    help="Report format.",
)
triggers_option = click.option(
    "--triggers",
    "triggers",
    default=None,
    type=click.Choice(TriggerMode.values()),
    help="Step trigger mode (default: from the scenario).",
)
dt_option = click.option(
    "--dt", "dt", type=click.FloatRange(min=0, min_open=True), help="Time step in s."
)
t_end_option = click.option(
    "--t-end",
    "t_end",
    type=click.FloatRange(min=0, min_open=True),
    help="Simulated horizon in s.",
)


@click.group()
@click.version_option(
    version=__version__,
    prog_name="h2blackstart",
)
@click.option(
    "--verbose",
    "-v",
    count=True,
    expose_value=False,
    is_eager=True,
    callback=enable_logging,
    help="Enable logging to stdout (-vv adds power-flow iteration traces).",
)
@click.option(
    "--validate",
    type=click.Path(exists=True, dir_okay=False),
    expose_value=False,
    is_eager=True,
    callback=validate_config,
    help="Validate scenario file and exit.",
)
@click.pass_context
def cli(ctx: click.Context):
    """Size and simulate the fuel-cell black start of an islanded wind-to-hydrogen microgrid.

    SCENARIO arguments accept a scenario file path or the name of a bundled scenario.
    """

    if ctx.obj is None:
        ctx.obj = Dependencies()


@cli.command("scenarios")
@click.pass_obj
def scenarios(deps: Dependencies):
    """
    List the bundled scenarios.
    """

    for name in deps.repository.list_all():
        click.echo(name)


@cli.command("size")
@click.argument("scenario")
@click.option(
    "--margin",
    "margin",
    type=click.FloatRange(min=0),
    default=None,
    help="Rating margin as a fraction (default: from the scenario).",
)
@format_option
@click.option("--out", "out", default=None, help="Report file path ('-' for stdout).")
@click.pass_obj
@reports_errors
def size(deps: Dependencies, scenario: str, margin: float | None, format: str, out: str | None):
    """
    Size the PEMFC from the minimum black-start power flow.
    """

    loaded = services.load_scenario(scenario, deps.repository)
    report = services.size(loaded, margin=margin)
    emit(render_sizing(report, ReportFormat.from_string(format)), out, deps)


@cli.command("flow")
@click.argument("scenario")
@format_option
@click.option("--out", "out", default=None, help="Report file path ('-' for stdout).")
@click.pass_obj
@reports_errors
def flow(deps: Dependencies, scenario: str, format: str, out: str | None):
    """
    Solve the scenario network and print bus voltages and branch flows.
    """

    loaded = services.load_scenario(scenario, deps.repository)
    solution, network = services.flow(loaded)
    emit(render_flow(solution, network, ReportFormat.from_string(format)), out, deps)


@cli.command("blackstart")
@click.argument("scenario")
@click.option(
    "--strategy",
    "strategy",
    default=str(Strategy.WHCC),
    type=click.Choice(Strategy.values()),
    help="Coordinated control strategy.",
)
@triggers_option
@click.option(
    "--out",
    "out",
    default=".",
    type=click.Path(file_okay=False, path_type=pathlib.Path),
    help="Directory for the time series, event log and summary.",
)
@dt_option
@t_end_option
@format_option
@click.pass_obj
@reports_errors
def blackstart(
    deps: Dependencies,
    scenario: str,
    strategy: str,
    triggers: str | None,
    out: pathlib.Path,
    dt: float | None,
    t_end: float | None,
    format: str,
):
    """
    Simulate the six-step black-start sequence and write its outputs.

    A run that faults or stalls still writes its partial time series and event log,
    with a <strategy>-fault.json record in place of the summary.
    """

    loaded = services.load_scenario(scenario, deps.repository)
    try:
        run = services.blackstart(
            loaded,
            Strategy.from_string(strategy),
            trigger_mode=TriggerMode.from_string(triggers) if triggers else None,
            dt=dt,
            t_end=t_end,
        )
    except BlackstartError as err:
        services.write_fault(loaded, err, out, deps.writer)
        raise
    summary = services.summarize(loaded, run)
    services.write_run(
        loaded,
        run,
        out,
        deps.writer,
        report=render_summary(summary, ReportFormat.JSON),
    )
    click.echo(render_summary(summary, ReportFormat.from_string(format)))


@cli.command("compare")
@click.argument("scenario")
@triggers_option
@dt_option
@t_end_option
@format_option
@click.option("--out", "out", default=None, help="Report file path ('-' for stdout).")
@click.pass_obj
@reports_errors
def compare(
    deps: Dependencies,
    scenario: str,
    triggers: str | None,
    dt: float | None,
    t_end: float | None,
    format: str,
    out: str | None,
):
    """
    Run WHCC and HSCC on the same scenario and report them side by side.
    """

    loaded = services.load_scenario(scenario, deps.repository)
    summaries = services.compare(
        loaded,
        trigger_mode=TriggerMode.from_string(triggers) if triggers else None,
        dt=dt,
        t_end=t_end,
    )
    emit(render_comparison(summaries, ReportFormat.from_string(format)), out, deps)
