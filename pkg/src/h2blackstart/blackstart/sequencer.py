"""Six-step black-start sequence with trigger predicates and per-strategy actions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping

from h2blackstart.domain.constants import (
    ActionKind,
    Breaker,
    DeviceKind,
    Strategy,
    Switch,
    TriggerMode,
)
from h2blackstart.domain.exceptions import InvalidInputError, SequencingError

log = logging.getLogger(__name__)

FINAL_STEP = 6
COMPLETE = FINAL_STEP + 1

# step 1..6 firing times of the reference case timeline, s
SCRIPTED_TIMES: tuple[float, ...] = (0.0, 0.2, 0.3, 0.5, 0.7, 1.7)


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    target: Switch | Breaker | DeviceKind | None = None
    value: int | bool | None = None

    def __str__(self) -> str:
        if self.kind == ActionKind.SET_SWITCH:
            return f"{self.target}={self.value}"
        if self.kind == ActionKind.SET_BREAKER:
            return f"{self.target}={int(bool(self.value))}"
        if self.kind == ActionKind.START_DEVICE:
            return f"start {self.target}"
        return "disconnect pemfc"


def _switch(switch: Switch, position: int) -> Action:
    return Action(ActionKind.SET_SWITCH, switch, position)


def _breaker(breaker: Breaker, closed: bool) -> Action:
    return Action(ActionKind.SET_BREAKER, breaker, closed)


def _start(device: DeviceKind) -> Action:
    return Action(ActionKind.START_DEVICE, device)


COMMON_STEPS: dict[int, tuple[Action, ...]] = {
    1: (
        _switch(Switch.S1, 0),
        _switch(Switch.S2, 0),
        _switch(Switch.S3, 0),
        _switch(Switch.S4, 0),
        _breaker(Breaker.B1, True),
        _breaker(Breaker.B2, True),
        _breaker(Breaker.B3, False),
        _breaker(Breaker.B4, False),
        _start(DeviceKind.PEMFC),
    ),
    2: (_breaker(Breaker.B3, True), _start(DeviceKind.LSC)),
    3: (_start(DeviceKind.MSC),),
    4: (_breaker(Breaker.B4, True), _switch(Switch.S3, 1)),
    5: (_start(DeviceKind.ELZ),),
}

FINAL_STEPS: dict[Strategy, tuple[Action, ...]] = {
    Strategy.WHCC: (
        _switch(Switch.S2, 1),
        _switch(Switch.S3, 2),
        _switch(Switch.S4, 1),
        Action(ActionKind.DISCONNECT_PEMFC),
    ),
    Strategy.HSCC: (_switch(Switch.S2, 1), _switch(Switch.S1, 1)),
}


def step_actions(
    strategy: Strategy, step: int, disconnect_pemfc: bool = True
) -> tuple[Action, ...]:
    if step in COMMON_STEPS:
        return COMMON_STEPS[step]
    if step != FINAL_STEP:
        raise InvalidInputError(f"No step {step} in the black-start sequence")

    actions = FINAL_STEPS[strategy]
    if not disconnect_pemfc:
        actions = tuple(a for a in actions if a.kind != ActionKind.DISCONNECT_PEMFC)
    return actions


@dataclass(frozen=True)
class TriggerThresholds:
    v_band: float = 0.02
    f_band: float = 0.005
    dc_band: float = 0.01
    sync_phasor_error: float = 0.01
    hold_time: float = 0.05
    steady_window: float = 0.1
    power_band: float = 0.05

    def __post_init__(self):
        for name, value in vars(self).items():
            if name == "hold_time":
                if value < 0.0:
                    raise InvalidInputError("TriggerThresholds: hold_time must be >= 0")
            elif value <= 0.0:
                raise InvalidInputError(f"TriggerThresholds: {name} must be > 0")


@dataclass(frozen=True)
class SystemMeasurements:
    """Quantities the trigger predicates look at, taken from the latest solved sample."""

    t: float
    v_buses: tuple[float, ...] = ()
    f_grid: float = 50.0
    f_ref: float = 50.0
    v_dc: float | None = None
    v_dc_ref: float = 1150.0
    sync_error: float | None = None
    steady: bool = False

    def snapshot(self) -> dict[str, float]:
        values = {"f_hz": self.f_grid, "steady": float(self.steady)}
        if self.v_buses:
            values["v_min"] = min(self.v_buses)
            values["v_max"] = max(self.v_buses)
        if self.v_dc is not None:
            values["v_dc"] = self.v_dc
        if self.sync_error is not None:
            values["sync_error"] = self.sync_error
        return values


@dataclass(frozen=True)
class EventRecord:
    t: float
    step: int
    kind: str
    actions: tuple[str, ...] = ()
    snapshot: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "step": self.step,
            "kind": self.kind,
            "actions": list(self.actions),
            "snapshot": dict(self.snapshot),
        }


@dataclass(frozen=True)
class SequencerState:
    strategy: Strategy
    step: int = 1
    switches: Mapping[Switch, int] = field(
        default_factory=lambda: {s: 0 for s in Switch}
    )
    breakers: Mapping[Breaker, bool] = field(
        default_factory=lambda: {b: False for b in Breaker}
    )
    trigger_timer: float | None = None
    armed: bool = False
    event_log: tuple[EventRecord, ...] = ()
    trigger_mode: TriggerMode = TriggerMode.CONDITION
    schedule: tuple[float, ...] = SCRIPTED_TIMES
    disconnect_pemfc: bool = True
    clock: float = 0.0
    pending_snapshot: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.step <= COMPLETE:
            raise InvalidInputError(f"Sequencer step out of range: {self.step}")
        if len(self.schedule) != FINAL_STEP:
            raise InvalidInputError(f"Scripted schedule needs {FINAL_STEP} times")
        if any(b < a for a, b in zip(self.schedule, self.schedule[1:])):
            raise InvalidInputError("Scripted schedule must be non-decreasing")

    @property
    def complete(self) -> bool:
        return self.step == COMPLETE

    @property
    def executed_steps(self) -> list[int]:
        return [e.step for e in self.event_log if e.kind == "step"]


def step_condition(
    step: int, meas: SystemMeasurements, thresholds: TriggerThresholds
) -> bool:
    """Whether the condition that releases `step` holds for one sample."""

    if step == 1:
        return True
    if step == 2:
        return _grid_in_band(meas, thresholds)
    if step == 3:
        return _dc_in_band(meas, thresholds)
    if step == 4:
        return (
            meas.sync_error is not None
            and meas.sync_error <= thresholds.sync_phasor_error
        )
    return meas.steady


def check_trigger(
    state: SequencerState,
    meas: SystemMeasurements,
    thresholds: TriggerThresholds,
    dt: float,
) -> tuple[SequencerState, bool]:
    """
    Evaluate the trigger of the pending step. Returns the updated state, which carries the hold timer and arms the next `advance`, together with whether the trigger fired.
    """

    if state.complete:
        return state, False
    if state.armed:
        return state, True

    if state.trigger_mode == TriggerMode.SCRIPTED:
        fired = round(meas.t / dt) >= round(state.schedule[state.step - 1] / dt)
        timer = None
    elif step_condition(state.step, meas, thresholds):
        timer = 0.0 if state.trigger_timer is None else state.trigger_timer + dt
        # the dead-grid start has nothing to wait for
        fired = state.step == 1 or timer >= thresholds.hold_time - 1e-12
    else:
        timer = None
        fired = False

    new = replace(
        state,
        trigger_timer=timer,
        armed=fired,
        clock=meas.t,
        pending_snapshot=meas.snapshot() if fired else {},
    )
    return new, fired


def advance(state: SequencerState) -> tuple[SequencerState, tuple[Action, ...]]:
    if state.complete:
        raise SequencingError("Sequence already complete")
    if not state.armed:
        raise SequencingError(f"Trigger of step {state.step} has not fired")

    actions = step_actions(state.strategy, state.step, state.disconnect_pemfc)
    switches = dict(state.switches)
    breakers = dict(state.breakers)
    for action in actions:
        if action.kind == ActionKind.SET_SWITCH:
            switches[action.target] = action.value
        elif action.kind == ActionKind.SET_BREAKER:
            breakers[action.target] = bool(action.value)
        elif action.kind == ActionKind.DISCONNECT_PEMFC:
            breakers[Breaker.B1] = False

    record = EventRecord(
        t=state.clock,
        step=state.step,
        kind="step",
        actions=tuple(str(a) for a in actions),
        snapshot=state.pending_snapshot,
    )
    log.info(f"t={state.clock:.4f} s: step {state.step} -> {', '.join(record.actions)}")

    new = replace(
        state,
        step=state.step + 1,
        switches=switches,
        breakers=breakers,
        trigger_timer=None,
        armed=False,
        event_log=state.event_log + (record,),
        pending_snapshot={},
    )
    return new, actions


def _grid_in_band(meas: SystemMeasurements, thresholds: TriggerThresholds) -> bool:
    if not meas.v_buses:
        return False
    voltages_ok = all(abs(v - 1.0) <= thresholds.v_band for v in meas.v_buses)
    frequency_ok = abs(meas.f_grid - meas.f_ref) <= thresholds.f_band * meas.f_ref
    return voltages_ok and frequency_ok


def _dc_in_band(meas: SystemMeasurements, thresholds: TriggerThresholds) -> bool:
    if meas.v_dc is None:
        return False
    return abs(meas.v_dc - meas.v_dc_ref) <= thresholds.dc_band * meas.v_dc_ref
