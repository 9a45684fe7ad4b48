"""Quasi-static phasor simulation of a complete black-start run.

Each time step evaluates the sequencer on the previous sample, steps the
device controllers, solves the network with the frequency-source device on the
reference bus and advances the system frequency.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np
import pandas as pd

from h2blackstart.blackstart.devices import (
    DeviceCommand,
    DeviceParams,
    DeviceState,
    Measurements,
    References,
    apply_switch,
    disconnect,
    initial_state,
    set_stator,
    start,
    step_device,
    tracking_error,
)
from h2blackstart.blackstart.sequencer import (
    SCRIPTED_TIMES,
    Action,
    EventRecord,
    SequencerState,
    SystemMeasurements,
    TriggerThresholds,
    advance,
    check_trigger,
)
from h2blackstart.blackstart.sizing import SizingScenario, scenario_loads
from h2blackstart.domain.constants import (
    SWITCH_OWNERS,
    ActionKind,
    Breaker,
    BusRole,
    DeviceKind,
    Strategy,
    TriggerMode,
)
from h2blackstart.domain.exceptions import (
    BlackoutFault,
    BlackstartError,
    InvalidInputError,
    NonConvergenceError,
    SequencerTimeout,
    SequencingError,
    SimulationFault,
)
from h2blackstart.grid.netmodel import BusSpec, Network
from h2blackstart.grid.powerflow import FlowOptions, solve
from h2blackstart.utils.dynamics import lag

log = logging.getLogger(__name__)

DEVICE_ORDER = (DeviceKind.PEMFC, DeviceKind.LSC, DeviceKind.MSC, DeviceKind.ELZ)


@dataclass(frozen=True)
class FrequencyParams:
    f_nominal: float = 50.0
    regulation_time: float = 0.05
    # Hz per MW of source imbalance
    droop: float = 0.5
    # Hz per MW carried by the outgoing source at a hand-over
    handover_gain: float = 0.6
    max_deviation: float = 0.05

    def __post_init__(self):
        if self.f_nominal <= 0.0 or self.regulation_time <= 0.0:
            raise InvalidInputError("FrequencyParams: f_nominal and regulation_time must be > 0")
        if min(self.droop, self.handover_gain) < 0.0:
            raise InvalidInputError("FrequencyParams: gains must be >= 0")
        if not 0.0 < self.max_deviation < 1.0:
            raise InvalidInputError("FrequencyParams: max_deviation must be in (0, 1)")


@dataclass(frozen=True)
class FrequencyState:
    f: float = 50.0
    source: DeviceKind | None = None


def frequency_dynamics(
    state: FrequencyState,
    source: DeviceKind | None,
    imbalance: float,
    dt: float,
    params: FrequencyParams = FrequencyParams(),
    outgoing_power: float = 0.0,
    t: float = 0.0,
) -> FrequencyState:
    """
    Advance the system frequency by one step. The frequency relaxes toward the droop target of the current source; a change of source subtracts a transient proportional to the power the outgoing source carried.
    """

    if source is None:
        raise BlackoutFault("No frequency source while the grid is energised", t=t)

    target = params.f_nominal - params.droop * imbalance
    f = lag(state.f, target, dt, params.regulation_time)

    if state.source is not None and state.source != source:
        f -= params.handover_gain * outgoing_power

    bound = params.max_deviation * params.f_nominal
    f = min(max(f, params.f_nominal - bound), params.f_nominal + bound)
    return FrequencyState(f=f, source=source)


@dataclass(frozen=True)
class WindProfile:
    """Active reference of the DFIG: a preset before step 6, MPPT availability after it."""

    preset: float = 2.0
    mppt_base: float = 2.9
    ramp_start: float = 1.8
    ramp_rate: float = 0.4

    def available(self, t: float) -> float:
        return self.mppt_base + max(0.0, t - self.ramp_start) * self.ramp_rate


@dataclass(frozen=True)
class PlantLayout:
    pemfc: int
    dfig: int
    elz: int
    wind_aux: int
    hydrogen_aux: int

    def device_bus(self, kind: DeviceKind) -> int:
        if kind == DeviceKind.PEMFC:
            return self.pemfc
        if kind == DeviceKind.ELZ:
            return self.elz
        return self.dfig


@dataclass(frozen=True)
class BlackstartScenario:
    network: Network
    layout: PlantLayout
    wind_aux_load: complex = 0j
    hydrogen_aux_load: complex = 0j
    devices: DeviceParams = field(default_factory=DeviceParams)
    thresholds: TriggerThresholds = field(default_factory=TriggerThresholds)
    wind: WindProfile = field(default_factory=WindProfile)
    schedule: tuple[float, ...] = SCRIPTED_TIMES
    disconnect_pemfc: bool = True
    aux_pickup_time: float = 0.05

    @classmethod
    def from_sizing(cls, sizing: SizingScenario, **kwargs) -> BlackstartScenario:
        """Simulation case on the sizing circuit; the LSC standby draw is taken from the sizing data."""

        loads = scenario_loads(sizing)
        buses = sizing.buses
        devices = kwargs.pop("devices", DeviceParams())
        devices = replace(
            devices, lsc=replace(devices.lsc, standby_power=sizing.lsc_standby_power)
        )
        return cls(
            network=sizing.network_template,
            layout=PlantLayout(
                pemfc=buses.reference,
                dfig=buses.dfig,
                elz=buses.hydrogen_aux,
                wind_aux=buses.wind_aux,
                hydrogen_aux=buses.hydrogen_aux,
            ),
            wind_aux_load=loads["wind_aux"],
            hydrogen_aux_load=loads["hydrogen_aux"],
            devices=devices,
            **kwargs,
        )


@dataclass(frozen=True)
class SimOptions:
    dt: float = 1e-3
    t_end: float = 2.5
    record_every: int = 1
    trigger_mode: TriggerMode = TriggerMode.CONDITION
    frequency: FrequencyParams = field(default_factory=FrequencyParams)
    flow: FlowOptions = field(default_factory=FlowOptions)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvalidInputError("SimOptions: dt must be > 0")
        if self.t_end <= self.dt:
            raise InvalidInputError("SimOptions: t_end must exceed dt")
        if self.record_every < 1:
            raise InvalidInputError("SimOptions: record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass(frozen=True)
class Sample:
    """
    One solved time step. Power values follow the injection convention: generation positive, loads negative, in MW/MVar; `loss` is the total network loss.
    """

    t: float
    step: int = 1
    f_hz: float = 50.0
    v_dc: float | None = None
    voltages: tuple[float, ...] = ()
    pemfc: complex = 0j
    dfig: complex = 0j
    lsc_p: float = 0.0
    elz_p: float = 0.0
    aux: complex = 0j
    loss: complex = 0j
    imbalance: float = 0.0
    tracking_error: float = 0.0
    sync_error: float | None = None
    source: str = ""
    wind_available: float = 0.0

    def to_record(self, bus_names: Sequence[str]) -> dict:
        record = {
            "t": self.t,
            "step": self.step,
            "source": self.source,
            "f_hz": self.f_hz,
            "v_dc": np.nan if self.v_dc is None else self.v_dc,
        }
        for name, v in zip(bus_names, self.voltages):
            record[f"v_{name}"] = v
        record.update(
            pemfc_p=self.pemfc.real,
            pemfc_q=self.pemfc.imag,
            dfig_p=self.dfig.real,
            dfig_q=self.dfig.imag,
            lsc_p=self.lsc_p,
            elz_p=self.elz_p,
            aux_p=self.aux.real,
            aux_q=self.aux.imag,
            loss_p=self.loss.real,
            loss_q=self.loss.imag,
            imbalance=self.imbalance,
            tracking_error=self.tracking_error,
            sync_error=np.nan if self.sync_error is None else self.sync_error,
            wind_available=self.wind_available,
        )
        return record


@dataclass
class TimeSeries:
    bus_names: tuple[str, ...]
    samples: list[Sample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> Sample:
        return self.samples[index]

    def append(self, sample: Sample) -> None:
        if self.samples and sample.t <= self.samples[-1].t:
            raise InvalidInputError("TimeSeries: sample times must increase")
        self.samples.append(sample)

    def between(self, t_start: float, t_stop: float) -> list[Sample]:
        return [s for s in self.samples if t_start <= s.t < t_stop]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [s.to_record(self.bus_names) for s in self.samples],
            columns=self.columns,
        )

    @property
    def columns(self) -> list[str]:
        return (
            ["t", "step", "source", "f_hz", "v_dc"]
            + [f"v_{name}" for name in self.bus_names]
            + [
                "pemfc_p",
                "pemfc_q",
                "dfig_p",
                "dfig_q",
                "lsc_p",
                "elz_p",
                "aux_p",
                "aux_q",
                "loss_p",
                "loss_q",
                "imbalance",
                "tracking_error",
                "sync_error",
                "wind_available",
            ]
        )


def steady_state_detector(
    window: Sequence[Sample],
    thresholds: TriggerThresholds,
    f_ref: float = 50.0,
    v_dc_ref: float = 1150.0,
) -> bool:
    if len(window) < 2 or window[-1].t - window[0].t < thresholds.steady_window - 1e-9:
        raise InvalidInputError(
            f"Steady-state window must span at least {thresholds.steady_window} s"
        )

    for sample in window:
        if any(abs(v - 1.0) > thresholds.v_band for v in sample.voltages):
            return False
        if abs(sample.f_hz - f_ref) > thresholds.f_band * f_ref:
            return False
        if (
            sample.v_dc is not None
            and abs(sample.v_dc - v_dc_ref) > thresholds.dc_band * v_dc_ref
        ):
            return False
        if sample.tracking_error > thresholds.power_band:
            return False
    return True


@dataclass(frozen=True)
class BlackstartRun:
    strategy: Strategy
    series: TimeSeries
    events: tuple[EventRecord, ...]
    sequencer: SequencerState
    f_nominal: float = 50.0
    v_dc_ref: float = 1150.0
    dc_band: float = 0.01

    @property
    def step_times(self) -> dict[int, float]:
        return {e.step: e.t for e in self.events if e.kind == "step"}

    @property
    def completion_time(self) -> float | None:
        return self.step_times.get(6)

    @property
    def final_step(self) -> str:
        return "COMPLETE" if self.sequencer.complete else str(self.sequencer.step)

    @property
    def peak_pemfc_p(self) -> float:
        return max(s.pemfc.real for s in self.series)

    @property
    def peak_pemfc_q(self) -> float:
        return max(s.pemfc.imag for s in self.series)

    @property
    def max_frequency_deviation(self) -> float:
        return max(abs(s.f_hz - self.f_nominal) for s in self.series)

    @property
    def pemfc_energy_mwh(self) -> float:
        t = np.array([s.t for s in self.series])
        p = np.array([s.pemfc.real for s in self.series])
        return float(np.trapezoid(p, t)) / 3600.0

    def plateau(self) -> list[Sample]:
        """Samples from the DC link first reaching its band until the stator breaker closes."""

        closing = self.step_times.get(4)
        band = self.dc_band * self.v_dc_ref
        charged = next(
            (
                s.t
                for s in self.series
                if s.v_dc is not None and abs(s.v_dc - self.v_dc_ref) <= band
            ),
            None,
        )
        if closing is None or charged is None:
            return []
        return self.series.between(charged, closing)

    def plateau_output(self) -> complex:
        samples = self.plateau()
        if not samples:
            raise InvalidInputError("Run has no steps 1-5 plateau")
        return complex(np.mean([s.pemfc for s in samples]))

    def summary(self) -> dict:
        return {
            "strategy": str(self.strategy),
            "final_step": self.final_step,
            "completion_time_s": self.completion_time,
            "peak_pemfc_p_mw": self.peak_pemfc_p,
            "peak_pemfc_q_mvar": self.peak_pemfc_q,
            "max_frequency_deviation_hz": self.max_frequency_deviation,
            "max_frequency_deviation_pct": 100.0
            * self.max_frequency_deviation
            / self.f_nominal,
            "pemfc_energy_mwh": self.pemfc_energy_mwh,
            "step_times_s": {str(k): v for k, v in self.step_times.items()},
        }


def static_dynamic_errors(
    run: BlackstartRun, p_min: float, q_min: float
) -> tuple[float, float]:
    """Relative deviation of the mean plateau PEMFC output from the sizing prediction."""

    mean = run.plateau_output()
    return (
        abs(mean.real - p_min) / max(abs(p_min), 1e-12),
        abs(mean.imag - q_min) / max(abs(q_min), 1e-12),
    )


class Simulation:
    def __init__(
        self,
        scenario: BlackstartScenario,
        strategy: Strategy,
        options: SimOptions = SimOptions(),
    ):
        self.scenario = scenario
        self.strategy = strategy
        self.options = options

        params = scenario.devices
        f_ref = options.frequency.f_nominal
        v_dc_ref = params.lsc.v_dc_ref
        self.devices: dict[DeviceKind, DeviceState] = {
            kind: initial_state(kind, References(f_ref=f_ref, v_dc_ref=v_dc_ref))
            for kind in DEVICE_ORDER
        }
        self.sequencer = SequencerState(
            strategy=strategy,
            trigger_mode=options.trigger_mode,
            schedule=scenario.schedule,
            disconnect_pemfc=scenario.disconnect_pemfc,
        )
        self.frequency = FrequencyState(f=f_ref)
        self.series = TimeSeries(bus_names=tuple(scenario.network.names))
        self.events: list[EventRecord] = []

        self.voltages: np.ndarray | None = None
        self.actual: dict[DeviceKind, complex] = {kind: 0j for kind in DEVICE_ORDER}
        self.imbalance = 0.0
        self.pickup = 0.0
        self.last: Sample | None = None
        self.window: deque[Sample] = deque(
            maxlen=int(round(scenario.thresholds.steady_window / options.dt)) + 1
        )

    def run(self) -> BlackstartRun:
        dt = self.options.dt
        try:
            for k in range(self.options.n_steps + 1):
                t = k * dt
                sample = self._step(t)
                self.window.append(sample)
                self.last = sample
                if k % self.options.record_every == 0:
                    self.series.append(sample)
        except BlackstartError as err:
            err.run = self._result()
            raise

        if not self.sequencer.complete:
            message = (
                f"Sequence stalled at step {self.sequencer.step} "
                f"after {self.options.t_end} s ({self.strategy})"
            )
            log.error(message)
            raise SequencerTimeout(message, state=self.sequencer, run=self._result())

        return self._result()

    def _result(self) -> BlackstartRun:
        return BlackstartRun(
            strategy=self.strategy,
            series=self.series,
            events=tuple(self.events),
            sequencer=self.sequencer,
            f_nominal=self.options.frequency.f_nominal,
            v_dc_ref=self.scenario.devices.lsc.v_dc_ref,
            dc_band=self.scenario.thresholds.dc_band,
        )

    def _step(self, t: float) -> Sample:
        dt = self.options.dt
        self._sequence(t)
        self._update_references(t)
        v_dc, sync_error = self._converter_readings()

        commands = self._step_devices(t)
        source = self._source(t)

        closed = self.sequencer.breakers[Breaker.B2]
        self.pickup = lag(
            self.pickup, 1.0 if closed else 0.0, dt, self.scenario.aux_pickup_time
        )
        injections = self._injections(source, commands)
        network = self._network(source, commands[source], injections)

        try:
            solution = solve(network, self.options.flow, initial=self.voltages)
        except NonConvergenceError as err:
            log.error(f"t={t:.4f} s: power flow diverged")
            raise SimulationFault(
                "Power flow diverged", t=t, last_good=self.last, cause=err
            ) from err

        s_base = network.s_base
        ref = self.scenario.layout.device_bus(source)
        source_output = complex(solution.injections[ref]) * s_base - injections[ref]

        previous = dict(self.actual)
        for kind, state in self.devices.items():
            if kind == source:
                self.actual[kind] = source_output
            elif state.connected:
                self.actual[kind] = commands[kind].s
            else:
                self.actual[kind] = 0j
        self.voltages = solution.voltages

        self.imbalance = source_output.real - self.devices[source].track("p_sched")
        outgoing = self.frequency.source
        self.frequency = frequency_dynamics(
            self.frequency,
            source,
            self.imbalance,
            dt,
            self.options.frequency,
            outgoing_power=previous[outgoing].real if outgoing else 0.0,
            t=t,
        )
        if outgoing is not None and outgoing != source:
            self._event(
                t,
                "handover",
                (f"{outgoing} -> {source}",),
                {"p_outgoing": previous[outgoing].real, "f_hz": self.frequency.f},
            )

        return self._sample(
            t, solution.voltages, solution.loss_total * s_base, v_dc, sync_error
        )

    def _sequence(self, t: float) -> None:
        meas = self._system_measurements(t)
        self.sequencer, fired = check_trigger(
            self.sequencer, meas, self.scenario.thresholds, self.options.dt
        )
        if not fired:
            return

        self.sequencer, actions = advance(self.sequencer)
        self.events.append(self.sequencer.event_log[-1])
        for action in actions:
            self._apply(action)

    def _apply(self, action: Action) -> None:
        devices = self.devices
        breakers = self.sequencer.breakers

        if action.kind == ActionKind.SET_SWITCH:
            owner = SWITCH_OWNERS[action.target]
            devices[owner] = apply_switch(devices[owner], action.target, action.value)
        elif action.kind == ActionKind.SET_BREAKER:
            if action.target == Breaker.B4:
                devices[DeviceKind.MSC] = set_stator(devices[DeviceKind.MSC], action.value)
            elif action.target == Breaker.B1 and not action.value:
                devices[DeviceKind.PEMFC] = disconnect(devices[DeviceKind.PEMFC])
            elif action.target == Breaker.B3 and not action.value:
                devices[DeviceKind.LSC] = disconnect(devices[DeviceKind.LSC])
        elif action.kind == ActionKind.START_DEVICE:
            kind = action.target
            if kind == DeviceKind.PEMFC and not breakers[Breaker.B1]:
                raise SequencingError("PEMFC started with B1 open")
            if kind == DeviceKind.LSC and not breakers[Breaker.B3]:
                raise SequencingError("LSC started with B3 open")
            devices[kind] = start(devices[kind], self._measurements(kind))
        elif action.kind == ActionKind.DISCONNECT_PEMFC:
            devices[DeviceKind.PEMFC] = disconnect(devices[DeviceKind.PEMFC])

    def _update_references(self, t: float) -> None:
        wind = self.scenario.wind
        p_ref = wind.available(t) if self.sequencer.complete else wind.preset
        msc = self.devices[DeviceKind.MSC]
        if msc.references.p_ref != p_ref:
            self.devices[DeviceKind.MSC] = msc.with_references(p_ref=p_ref)

    def _step_devices(self, t: float) -> dict[DeviceKind, DeviceCommand]:
        commands = {}
        for kind in DEVICE_ORDER:
            before = self.devices[kind]
            state, command = step_device(
                before, self._measurements(kind), self.options.dt, self.scenario.devices
            )
            if state.clamped and not before.clamped:
                log.warning(f"t={t:.4f} s: {kind} command clamped")
                self._event(t, "clamp", (str(kind),), {"p_mw": state.p_out})
            self.devices[kind] = state
            commands[kind] = command
        return commands

    def _source(self, t: float) -> DeviceKind:
        sources = [k for k, s in self.devices.items() if s.frequency_source]
        if len(sources) != 1:
            names = ", ".join(str(s) for s in sources) or "none"
            log.error(f"t={t:.4f} s: frequency sources: {names}")
            raise BlackoutFault(
                f"Exactly one frequency source required, found {names}",
                t=t,
                last_good=self.last,
            )
        return sources[0]

    def _measurements(self, kind: DeviceKind) -> Measurements:
        bus = self.scenario.layout.device_bus(kind)
        v = complex(self.voltages[bus]) if self.voltages is not None else 1 + 0j
        lsc = self.devices[DeviceKind.LSC]
        msc = self.devices[DeviceKind.MSC]
        actual = self.actual[kind]
        return Measurements(
            v_bus=abs(v),
            f_grid=self.frequency.f,
            v_dc=lsc.track("v_dc") if lsc.connected else 0.0,
            stator_v=msc.track("stator", 0j),
            grid_v=v,
            p_meas=actual.real,
            q_meas=actual.imag,
            p_balance=self.imbalance,
        )

    def _system_measurements(self, t: float) -> SystemMeasurements:
        f_ref = self.options.frequency.f_nominal
        v_dc_ref = self.scenario.devices.lsc.v_dc_ref
        if self.last is None:
            return SystemMeasurements(t=t, f_grid=f_ref, f_ref=f_ref, v_dc_ref=v_dc_ref)

        steady = len(self.window) == self.window.maxlen and steady_state_detector(
            self.window, self.scenario.thresholds, f_ref=f_ref, v_dc_ref=v_dc_ref
        )
        return SystemMeasurements(
            t=t,
            v_buses=self.last.voltages,
            f_grid=self.last.f_hz,
            f_ref=f_ref,
            v_dc=self.last.v_dc,
            v_dc_ref=v_dc_ref,
            sync_error=self.last.sync_error,
            steady=steady,
        )

    def _injections(
        self, source: DeviceKind, commands: dict[DeviceKind, DeviceCommand]
    ) -> np.ndarray:
        """Specified bus injections in MW/MVar, the source device excluded."""

        layout = self.scenario.layout
        injections = np.zeros(self.scenario.network.n_buses, dtype=complex)
        injections[layout.wind_aux] -= self.pickup * self.scenario.wind_aux_load
        injections[layout.hydrogen_aux] -= self.pickup * self.scenario.hydrogen_aux_load
        for kind, command in commands.items():
            if kind != source:
                injections[layout.device_bus(kind)] += command.s
        return injections

    def _network(
        self, source: DeviceKind, command: DeviceCommand, injections: np.ndarray
    ) -> Network:
        template = self.scenario.network
        ref = self.scenario.layout.device_bus(source)
        v_set = command.v_set if command.v_set is not None else 1.0

        buses = tuple(
            BusSpec(
                id=bus.id,
                role=BusRole.REFERENCE if bus.id == ref else BusRole.PQ,
                v_set=v_set if bus.id == ref else 1.0,
                p_inject=0.0 if bus.id == ref else injections[bus.id].real / template.s_base,
                q_inject=0.0 if bus.id == ref else injections[bus.id].imag / template.s_base,
                name=bus.name,
            )
            for bus in template.buses
        )
        return replace(template, buses=buses)

    def _converter_readings(self) -> tuple[float | None, float | None]:
        """DC-link voltage and stator sync error as they stand at the start of a step."""

        lsc = self.devices[DeviceKind.LSC]
        msc = self.devices[DeviceKind.MSC]
        v_dc = lsc.track("v_dc") if lsc.connected else None
        sync_error = None
        if msc.connected:
            grid_v = complex(self._measurements(DeviceKind.MSC).grid_v)
            sync_error = abs(msc.track("stator", 0j) - grid_v)
        return v_dc, sync_error

    def _sample(
        self,
        t: float,
        voltages: np.ndarray,
        loss: complex,
        v_dc: float | None,
        sync_error: float | None,
    ) -> Sample:
        params = self.scenario.devices

        aux = -self.pickup * (self.scenario.wind_aux_load + self.scenario.hydrogen_aux_load)
        return Sample(
            t=t,
            step=self.sequencer.step,
            f_hz=self.frequency.f,
            v_dc=v_dc,
            voltages=tuple(float(v) for v in np.abs(voltages)),
            pemfc=self.actual[DeviceKind.PEMFC],
            dfig=self.actual[DeviceKind.MSC],
            lsc_p=self.actual[DeviceKind.LSC].real,
            elz_p=self.actual[DeviceKind.ELZ].real,
            aux=complex(aux),
            loss=complex(loss),
            imbalance=self.imbalance,
            tracking_error=max(tracking_error(s, params) for s in self.devices.values()),
            sync_error=sync_error,
            source=str(self.frequency.source),
            wind_available=self.scenario.wind.available(t),
        )

    def _event(self, t: float, kind: str, actions: tuple[str, ...], snapshot: dict) -> None:
        self.events.append(
            EventRecord(
                t=t,
                step=self.sequencer.step,
                kind=kind,
                actions=actions,
                snapshot=snapshot,
            )
        )


def run_blackstart(
    scenario: BlackstartScenario,
    strategy: Strategy,
    options: SimOptions = SimOptions(),
) -> BlackstartRun:
    log.info(f"black-start run: {strategy}, {options.trigger_mode} triggers, dt={options.dt}")
    return Simulation(scenario, strategy, options).run()
