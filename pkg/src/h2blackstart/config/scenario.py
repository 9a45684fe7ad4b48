"""Conversion of validated scenario content into the `Scenario` aggregate."""

from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from typing import Any, Iterator

from h2blackstart.blackstart.devices import (
    DeviceParams,
    ElzParams,
    LscParams,
    MscParams,
    PemfcParams,
)
from h2blackstart.blackstart.sequencer import SCRIPTED_TIMES, TriggerThresholds
from h2blackstart.blackstart.sim import FrequencyParams, SimOptions, WindProfile
from h2blackstart.blackstart.sizing import (
    AuxLoad,
    AuxLoadTable,
    SizingBuses,
    SizingScenario,
)
from h2blackstart.domain.constants import BranchKind, BusRole, TriggerMode
from h2blackstart.domain.exceptions import InvalidInputError, ScenarioError
from h2blackstart.domain.model import CalibrationInfo, Scenario
from h2blackstart.grid.netmodel import Branch, BusSpec, Network, transformer_tap
from h2blackstart.grid.powerflow import FlowOptions

log = logging.getLogger(__name__)


@contextmanager
def located(location: str) -> Iterator[None]:
    """Re-raise construction errors as scenario errors pointing at `location`."""

    try:
        yield
    except InvalidInputError as err:
        raise ScenarioError(str(err), location=location) from err


def build_scenario(content: dict[str, Any], name: str = "scenario") -> Scenario:
    network_section = content["network"]
    network = build_network(network_section)
    index = {bus.name: bus.id for bus in network.buses}

    sizing = None
    if "sizing" in content:
        sizing = build_sizing(content["sizing"], network, index)

    sequence = content.get("sequence", {})
    simulation = content.get("simulation", {})
    f_nominal = network_section.get("f_nominal_hz", 50.0)

    with located("$.devices"):
        devices = build_devices(content.get("devices", {}))
    with located("$.sequence.thresholds"):
        thresholds = TriggerThresholds(**sequence.get("thresholds", {}))
    with located("$.simulation"):
        options = build_options(simulation, f_nominal)
        wind = WindProfile(**simulation.get("wind", {}))

    schedule = tuple(sequence.get("schedule_s", SCRIPTED_TIMES))
    if any(b < a for a, b in zip(schedule, schedule[1:])):
        raise ScenarioError(
            "Scripted times must be non-decreasing", "$.sequence.schedule_s"
        )

    calibration = None
    if "calibration" in content:
        block = content["calibration"]
        calibration = CalibrationInfo(
            source=block.get("source", ""),
            fitted=tuple(block.get("fitted", ())),
            verbatim=tuple(block.get("verbatim", ())),
            targets=dict(block.get("targets", {})),
            tolerance=block.get("tolerance", 0.05),
        )

    scenario = Scenario(
        name=name,
        network=network,
        sizing=sizing,
        devices=devices,
        thresholds=thresholds,
        schedule=schedule,
        disconnect_pemfc=sequence.get("disconnect_pemfc", True),
        wind=wind,
        aux_pickup_time=simulation.get("aux_pickup_time", 0.05),
        options=options,
        calibration=calibration,
    )
    log.debug(f"scenario {name!r}: {network.n_buses} buses, {len(network.branches)} branches")
    return scenario


def build_network(section: dict[str, Any]) -> Network:
    s_base = section.get("s_base_mva", 10.0)
    data_base = section.get("data_base_mva", s_base)

    index: dict[str, int] = {}
    buses = []
    for i, item in enumerate(section["buses"]):
        location = f"$.network.buses[{i}]"
        if item["name"] in index:
            raise ScenarioError(f"Duplicate bus name {item['name']!r}", f"{location}.name")
        index[item["name"]] = i

        with located(location):
            buses.append(
                BusSpec(
                    id=i,
                    role=BusRole.from_string(item.get("role", "pq")),
                    v_set=item.get("v_set", 1.0),
                    angle_set=math.radians(item.get("angle_deg", 0.0)),
                    p_inject=item.get("p_mw", 0.0) / data_base,
                    q_inject=item.get("q_mvar", 0.0) / data_base,
                    name=item["name"],
                )
            )

    references = [b.id for b in buses if b.role == BusRole.REFERENCE]
    if len(references) != 1:
        raise ScenarioError(
            f"Exactly one reference bus required, found {len(references)}",
            "$.network.buses",
        )

    v_bases = tuple(item["v_base_kv"] for item in section["buses"])
    branches = []
    for i, item in enumerate(section.get("branches", [])):
        location = f"$.network.branches[{i}]"
        ends = []
        for key in ("from", "to"):
            if item[key] not in index:
                raise ScenarioError(f"Unknown bus {item[key]!r}", f"{location}.{key}")
            ends.append(index[item[key]])

        kind = BranchKind.from_string(item.get("kind", "line"))
        tau = item.get("tap", 1.0)
        with located(location):
            if "rated_kv" in item:
                tau *= transformer_tap(item["rated_kv"], v_bases[ends[0]], v_bases[ends[1]])
            branches.append(
                Branch(
                    from_bus=ends[0],
                    to_bus=ends[1],
                    r_s=item["r"],
                    x_s=item["x"],
                    b_c=item.get("b", 0.0),
                    tau=tau,
                    theta_shift=math.radians(item.get("shift_deg", 0.0)),
                    in_service=item.get("in_service", True),
                    name=item.get("name", ""),
                    kind=kind,
                )
            )

    with located("$.network"):
        network = Network(
            buses=tuple(buses), branches=tuple(branches), s_base=data_base, v_bases=v_bases
        )
        if data_base != s_base:
            network = network.rebase(s_base)
    return network


def build_aux_table(block: dict[str, Any], location: str) -> AuxLoadTable:
    entries = []
    for i, item in enumerate(block.get("entries", [])):
        with located(f"{location}.entries[{i}]"):
            entries.append(
                AuxLoad(
                    name=item["name"],
                    rated_kw=item["rated_kw"],
                    count=item.get("count", 1),
                    reactive_kvar=item.get("reactive_kvar", 0.0),
                )
            )
    return AuxLoadTable(entries=tuple(entries), source=block.get("source", ""))


def build_sizing(
    section: dict[str, Any], network: Network, index: dict[str, int]
) -> SizingScenario:
    buses = {}
    for key, bus in section["buses"].items():
        if bus not in index:
            raise ScenarioError(f"Unknown bus {bus!r}", f"$.sizing.buses.{key}")
        buses[key] = index[bus]

    tables = tuple(
        build_aux_table(block, f"$.sizing.wind_aux_tables[{i}]")
        for i, block in enumerate(section.get("wind_aux_tables", []))
    )

    with located("$.sizing"):
        sizing_buses = SizingBuses(reference=network.reference_bus, **buses)
        if not sizing_buses.distinct():
            raise InvalidInputError("Sizing buses and the reference bus must be distinct")
        return SizingScenario(
            dfig_rating=section["dfig_rating_mw"],
            hydrogen_aux=build_aux_table(section["hydrogen_aux"], "$.sizing.hydrogen_aux"),
            network_template=network,
            buses=sizing_buses,
            wind_aux_ratio=section.get("wind_aux_ratio", 0.05),
            hydrogen_aux_q=section.get("hydrogen_aux_q_mvar", 0.0),
            secondary_load=section.get("secondary_load_mw", 0.0),
            lsc_standby_power=section.get("lsc_standby_mw", 0.04),
            margin=section.get("margin", 0.30),
            rating_granularity=section.get("rating_granularity_mw", 0.5),
            wind_aux_tables=tables,
        )


def build_devices(section: dict[str, Any]) -> DeviceParams:
    return DeviceParams(
        pemfc=PemfcParams(**section.get("pemfc", {})),
        lsc=LscParams(**section.get("lsc", {})),
        msc=MscParams(**section.get("msc", {})),
        elz=ElzParams(**section.get("elz", {})),
    )


def build_options(section: dict[str, Any], f_nominal: float) -> SimOptions:
    return SimOptions(
        dt=section.get("dt", 1e-3),
        t_end=section.get("t_end", 2.5),
        record_every=section.get("record_every", 1),
        trigger_mode=TriggerMode.from_string(section.get("triggers", "condition")),
        frequency=FrequencyParams(f_nominal=f_nominal, **section.get("frequency", {})),
        flow=FlowOptions(**section.get("flow", {})),
    )
