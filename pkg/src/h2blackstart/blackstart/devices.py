"""Controller state machines for the PEMFC, the DFIG converters and the electrolyzer.

Inner current loops are first-order tracking elements. Every step function
returns the new state together with the command the device applies to the
network during the current time step; the command is taken from the state the
device entered the step with, so a mode change never moves the output within
the step it happens in.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from h2blackstart.domain.constants import (
    LEGAL_MODES,
    SWITCH_MODES,
    SWITCH_OWNERS,
    ControlMode,
    DeviceKind,
    Switch,
)
from h2blackstart.domain.exceptions import InvalidInputError, SequencingError
from h2blackstart.utils.dynamics import clamp, lag, lag_complex, rate_limit

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class References:
    v_ref: float = 1.0
    f_ref: float = 50.0
    p_ref: float = 0.0
    q_ref: float = 0.0
    v_dc_ref: float = 1150.0


@dataclass(frozen=True)
class Measurements:
    v_bus: float = 1.0
    f_grid: float = 50.0
    v_dc: float = 0.0
    stator_v: complex = 0j
    grid_v: complex = 1 + 0j
    p_meas: float = 0.0
    q_meas: float = 0.0
    # source output minus source schedule, MW
    p_balance: float = 0.0

    def __post_init__(self):
        if min(self.v_bus, self.f_grid, self.v_dc) < 0.0:
            raise InvalidInputError("Measurements: magnitudes must be >= 0")


@dataclass(frozen=True)
class DeviceCommand:
    p: float = 0.0
    q: float = 0.0
    v_set: float | None = None
    is_reference: bool = False

    @property
    def s(self) -> complex:
        return complex(self.p, self.q)


@dataclass(frozen=True)
class PemfcParams:
    rating: float = 3.0
    tau_inner: float = 0.01
    tau_outer: float = 0.1
    loss_allowance: float = 0.05


@dataclass(frozen=True)
class LscParams:
    v_dc_ref: float = 1150.0
    tau_dc: float = 0.02
    capacitance: float = 0.005
    standby_power: float = 0.04


@dataclass(frozen=True)
class MscParams:
    rating: float = 6.25
    tau_inner: float = 0.01
    tau_sync: float = 0.03
    tau_voltage: float = 0.1
    excitation_q: float = 0.08
    ramp_rate: float = 4.0
    min_dc_fraction: float = 0.9


@dataclass(frozen=True)
class ElzParams:
    rating: float = 5.0
    min_fraction: float = 0.1
    floor_fraction: float = 0.02
    tau_inner: float = 0.01
    tau_outer: float = 0.1

    def __post_init__(self):
        if self.rating <= 0.0:
            raise InvalidInputError("ElzParams: rating must be > 0")
        if not 0.0 <= self.floor_fraction <= self.min_fraction <= 1.0:
            raise InvalidInputError(
                "ElzParams: require 0 <= floor_fraction <= min_fraction <= 1"
            )

    @property
    def min_power(self) -> float:
        return self.rating * self.min_fraction

    @property
    def floor(self) -> float:
        return self.rating * self.floor_fraction


@dataclass(frozen=True)
class DeviceParams:
    pemfc: PemfcParams = field(default_factory=PemfcParams)
    lsc: LscParams = field(default_factory=LscParams)
    msc: MscParams = field(default_factory=MscParams)
    elz: ElzParams = field(default_factory=ElzParams)

    def __post_init__(self):
        for name in ("pemfc", "lsc", "msc", "elz"):
            block = getattr(self, name)
            for key, value in vars(block).items():
                if key.startswith("tau") and value <= 0.0:
                    raise InvalidInputError(f"{name}.{key} must be > 0")


INITIAL_MODES: dict[DeviceKind, ControlMode] = {
    DeviceKind.PEMFC: ControlMode.VCL,
    DeviceKind.LSC: ControlMode.DC_REGULATION,
    DeviceKind.MSC: ControlMode.VCL,
    DeviceKind.ELZ: ControlMode.PCL,
}


@dataclass(frozen=True)
class DeviceState:
    kind: DeviceKind
    mode: ControlMode
    connected: bool = False
    p_out: float = 0.0
    q_out: float = 0.0
    tracking: Mapping[str, float | complex] = field(default_factory=dict)
    references: References = field(default_factory=References)
    switches: Mapping[Switch, int] = field(default_factory=dict)
    stator_closed: bool = False
    clamped: bool = False

    def __post_init__(self):
        if self.mode not in LEGAL_MODES[self.kind]:
            raise InvalidInputError(f"Mode {self.mode} is not legal for {self.kind}")
        if not self.connected:
            object.__setattr__(self, "p_out", 0.0)
            object.__setattr__(self, "q_out", 0.0)

    @property
    def output(self) -> complex:
        return complex(self.p_out, self.q_out)

    @property
    def frequency_source(self) -> bool:
        """Whether the device currently fixes the grid frequency and angle."""

        if not self.connected:
            return False
        if self.kind == DeviceKind.PEMFC:
            return self.mode in (ControlMode.VCL, ControlMode.PVCL)
        if self.kind == DeviceKind.MSC:
            return (
                self.mode == ControlMode.APCL
                and self.stator_closed
                and self.switches.get(Switch.S4, 0) == 1
            )
        return False

    def track(self, key: str, default: float | complex = 0.0) -> float | complex:
        return self.tracking.get(key, default)

    def with_tracking(self, **values: float | complex) -> DeviceState:
        return replace(self, tracking={**self.tracking, **values})

    def with_references(self, **values: float) -> DeviceState:
        return replace(self, references=replace(self.references, **values))

    def emitted(self, **kwargs) -> DeviceCommand:
        return DeviceCommand(p=self.p_out, q=self.q_out, **kwargs)


def initial_state(
    kind: DeviceKind, references: References | None = None
) -> DeviceState:
    switches = {s: 0 for s, owner in SWITCH_OWNERS.items() if owner == kind}
    return DeviceState(
        kind=kind,
        mode=INITIAL_MODES[kind],
        references=references or References(),
        switches=switches,
    )


def start(state: DeviceState, meas: Measurements = Measurements()) -> DeviceState:
    """Energise a device from rest."""

    if state.connected:
        return state

    tracking: dict[str, float | complex] = {
        "p_track": 0.0,
        "q_track": 0.0,
        "p_sched": 0.0,
    }
    if state.kind == DeviceKind.PEMFC:
        tracking["v_track"] = state.references.v_ref
    elif state.kind == DeviceKind.LSC:
        tracking["v_dc"] = meas.v_dc
    elif state.kind == DeviceKind.MSC:
        tracking.update(stator=meas.stator_v, p_ramp=0.0, v_track=meas.v_bus)
    elif state.kind == DeviceKind.ELZ:
        tracking["consumption"] = 0.0

    log.info(f"{state.kind} started in {state.mode}")
    return replace(state, connected=True, tracking=tracking, p_out=0.0, q_out=0.0)


def disconnect(state: DeviceState) -> DeviceState:
    if state.connected:
        log.info(f"{state.kind} disconnected")
    return replace(state, connected=False, stator_closed=False)


def set_stator(state: DeviceState, closed: bool) -> DeviceState:
    if state.kind != DeviceKind.MSC:
        raise InvalidInputError("Only the MSC owns a stator breaker")
    return replace(state, stator_closed=closed)


def pemfc_step(
    state: DeviceState,
    meas: Measurements,
    dt: float,
    params: PemfcParams = PemfcParams(),
) -> tuple[DeviceState, DeviceCommand]:
    _check_step(state, DeviceKind.PEMFC, dt)
    if not state.connected:
        return state, DeviceCommand()

    refs = state.references

    if state.mode == ControlMode.PCL:
        p_track = lag(state.track("p_track"), refs.p_ref, dt, params.tau_inner)
        q_track = lag(state.track("q_track"), refs.q_ref, dt, params.tau_inner)
        new = state.with_tracking(p_track=p_track, q_track=q_track, p_sched=p_track)
        return replace(new, p_out=p_track, q_out=q_track), state.emitted()

    v_track = state.track("v_track", refs.v_ref)
    command = state.emitted(v_set=v_track, is_reference=True)

    if state.mode == ControlMode.VCL:
        p_sched = lag(state.track("p_sched"), meas.p_meas, dt, params.tau_inner)
    else:
        target = refs.p_ref + params.loss_allowance
        p_sched = lag(state.track("p_sched"), target, dt, params.tau_outer)

    new = state.with_tracking(
        v_track=lag(v_track, refs.v_ref, dt, params.tau_outer), p_sched=p_sched
    )
    return replace(new, p_out=meas.p_meas, q_out=meas.q_meas), command


def lsc_step(
    state: DeviceState,
    meas: Measurements,
    dt: float,
    params: LscParams = LscParams(),
) -> tuple[DeviceState, DeviceCommand]:
    """Charge and hold the DC link; the returned command is the draw seen by the grid."""

    _check_step(state, DeviceKind.LSC, dt)
    if not state.connected:
        return state, DeviceCommand()

    v_dc = state.track("v_dc")
    v_next = lag(v_dc, state.references.v_dc_ref, dt, params.tau_dc)
    # energy put into the DC capacitor over this step, in MW
    charge = 0.5 * params.capacitance * (v_next**2 - v_dc**2) / dt / 1e6
    draw = params.standby_power + charge

    new = state.with_tracking(v_dc=v_next)
    return replace(new, p_out=-draw, q_out=0.0), DeviceCommand(p=state.p_out, q=0.0)


def msc_step(
    state: DeviceState,
    meas: Measurements,
    dt: float,
    params: MscParams = MscParams(),
) -> tuple[DeviceState, DeviceCommand]:
    _check_step(state, DeviceKind.MSC, dt)
    if not state.connected:
        return state, DeviceCommand()

    threshold = params.min_dc_fraction * state.references.v_dc_ref
    if meas.v_dc < threshold:
        raise SequencingError(
            f"MSC stepped with DC link at {meas.v_dc:.1f} V (interlock {threshold:.1f} V)"
        )

    refs = state.references

    if state.mode == ControlMode.VCL:
        stator = lag_complex(
            state.track("stator", meas.stator_v), meas.grid_v, dt, params.tau_sync
        )
        new = state.with_tracking(stator=stator, v_track=meas.v_bus)
        return (
            replace(new, p_out=0.0, q_out=-params.excitation_q),
            state.emitted(),
        )

    if state.frequency_source:
        v_track = state.track("v_track", refs.v_ref)
        command = state.emitted(v_set=v_track, is_reference=True)
        p_sched = lag(state.track("p_sched"), refs.p_ref, dt, params.tau_inner)
        new = state.with_tracking(
            v_track=lag(v_track, refs.v_ref, dt, params.tau_voltage),
            p_sched=p_sched,
            stator=meas.grid_v,
        )
        return replace(new, p_out=meas.p_meas, q_out=meas.q_meas), command

    target = refs.p_ref if state.stator_closed else 0.0
    p_ramp = rate_limit(state.track("p_ramp"), target, dt, params.ramp_rate)
    p_track = lag(state.track("p_track"), p_ramp, dt, params.tau_inner)
    if state.mode == ControlMode.APCL:
        q_target = 0.0
    else:
        q_target = refs.q_ref if state.stator_closed else 0.0
    q_track = lag(state.track("q_track"), q_target, dt, params.tau_inner)

    new = state.with_tracking(
        p_ramp=p_ramp,
        p_track=p_track,
        q_track=q_track,
        p_sched=p_track,
        stator=meas.grid_v,
        v_track=meas.v_bus,
    )
    return replace(new, p_out=p_track, q_out=q_track), state.emitted()


def elz_step(
    state: DeviceState,
    meas: Measurements,
    dt: float,
    params: ElzParams = ElzParams(),
) -> tuple[DeviceState, DeviceCommand]:
    _check_step(state, DeviceKind.ELZ, dt)
    if not state.connected:
        return state, DeviceCommand()

    consumption = state.track("consumption")

    if state.mode == ControlMode.EMERGENCY:
        new = state.with_tracking(consumption=params.floor)
        return (
            replace(new, p_out=-params.floor, q_out=0.0, clamped=False),
            DeviceCommand(p=-params.floor),
        )

    if state.mode == ControlMode.PCL:
        target = params.min_power
        tau = params.tau_inner
    else:
        target = consumption - meas.p_balance
        tau = params.tau_outer

    consumption, clamped = clamp(
        lag(consumption, target, dt, tau), params.floor, params.rating
    )
    if clamped:
        log.debug(f"electrolyzer consumption clamped at {consumption:.4f} MW")

    new = state.with_tracking(consumption=consumption)
    return (
        replace(new, p_out=-consumption, q_out=0.0, clamped=clamped),
        state.emitted(),
    )


StepFunction = Callable[..., tuple[DeviceState, DeviceCommand]]

STEP_FUNCTIONS: dict[DeviceKind, tuple[StepFunction, str]] = {
    DeviceKind.PEMFC: (pemfc_step, "pemfc"),
    DeviceKind.LSC: (lsc_step, "lsc"),
    DeviceKind.MSC: (msc_step, "msc"),
    DeviceKind.ELZ: (elz_step, "elz"),
}


def step_device(
    state: DeviceState,
    meas: Measurements,
    dt: float,
    params: DeviceParams = DeviceParams(),
) -> tuple[DeviceState, DeviceCommand]:
    function, block = STEP_FUNCTIONS[state.kind]
    return function(state, meas, dt, getattr(params, block))


def apply_switch(state: DeviceState, switch: Switch, position: int) -> DeviceState:
    """
    Move `switch` to `position` on the device that owns it. Tracking states are re-initialised from the present output so the next emitted command equals the last one.
    """

    if SWITCH_OWNERS[switch] != state.kind:
        raise InvalidInputError(f"{switch} does not belong to {state.kind}")
    if position not in SWITCH_MODES[switch]:
        raise InvalidInputError(
            f"Illegal position {position} for {switch}, "
            f"expected one of {sorted(SWITCH_MODES[switch])}"
        )
    if state.switches.get(switch) == position:
        return state

    mode = SWITCH_MODES[switch][position] or state.mode
    switches = {**state.switches, switch: position}
    log.debug(f"{state.kind}: {switch}={position} ({state.mode} -> {mode})")

    new = replace(state, mode=mode, switches=switches)
    if not state.connected:
        return new
    return new.with_tracking(
        p_track=state.p_out,
        q_track=state.q_out,
        p_sched=state.p_out,
        p_ramp=state.p_out,
        consumption=-state.p_out,
    )


def tracking_error(state: DeviceState, params: DeviceParams = DeviceParams()) -> float:
    """Distance of a power-controlled device from its active-power target, in MW."""

    if not state.connected:
        return 0.0
    if state.kind == DeviceKind.ELZ and state.mode == ControlMode.PCL:
        return abs(state.track("consumption") - params.elz.min_power)
    if state.kind == DeviceKind.MSC and state.mode != ControlMode.VCL:
        if state.frequency_source:
            return abs(state.p_out - state.track("p_sched"))
        target = state.references.p_ref if state.stator_closed else 0.0
        return abs(state.p_out - target)
    if state.kind == DeviceKind.PEMFC and state.mode == ControlMode.PCL:
        return abs(state.p_out - state.references.p_ref)
    return 0.0


def _check_step(state: DeviceState, kind: DeviceKind, dt: float) -> None:
    if state.kind != kind:
        raise InvalidInputError(f"Expected a {kind} state, got {state.kind}")
    if dt <= 0.0:
        raise InvalidInputError("Time step must be > 0")
