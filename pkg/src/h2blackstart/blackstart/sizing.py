"""Black-start source sizing on the minimum supply circuit."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from h2blackstart.domain.constants import BranchKind, BusRole
from h2blackstart.domain.exceptions import InvalidInputError
from h2blackstart.grid.netmodel import BusSpec, Network, to_per_unit
from h2blackstart.grid.powerflow import FlowOptions, NetworkSolution, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuxLoad:
    name: str
    rated_kw: float
    count: int = 1
    reactive_kvar: float = 0.0

    def __post_init__(self):
        if self.rated_kw < 0.0 or self.reactive_kvar < 0.0:
            raise InvalidInputError(f"Aux load {self.name!r}: ratings must be >= 0")
        if self.count < 1:
            raise InvalidInputError(f"Aux load {self.name!r}: count must be >= 1")


@dataclass(frozen=True)
class AuxLoadTable:
    entries: tuple[AuxLoad, ...] = ()
    source: str = ""

    @property
    def total_kw(self) -> float:
        return sum(entry.count * entry.rated_kw for entry in self.entries)

    @property
    def total_kvar(self) -> float:
        return sum(entry.count * entry.reactive_kvar for entry in self.entries)

    def with_count(self, name: str, count: int) -> AuxLoadTable:
        entries = tuple(
            replace(entry, count=count) if entry.name == name else entry
            for entry in self.entries
        )
        return replace(self, entries=entries)


@dataclass(frozen=True)
class SizingBuses:
    """Indices of the buses of the minimum supply circuit that carry loads or the source."""

    wind_aux: int
    dfig: int
    hydrogen_aux: int
    reference: int

    def distinct(self) -> bool:
        return len({self.wind_aux, self.dfig, self.hydrogen_aux, self.reference}) == 4


@dataclass(frozen=True)
class SizingScenario:
    dfig_rating: float
    hydrogen_aux: AuxLoadTable
    network_template: Network
    buses: SizingBuses
    wind_aux_ratio: float = 0.05
    hydrogen_aux_q: float = 0.0
    secondary_load: float = 0.0
    lsc_standby_power: float = 0.04
    margin: float = 0.30
    rating_granularity: float = 0.5
    wind_aux_tables: tuple[AuxLoadTable, ...] = field(default=())

    def __post_init__(self):
        if self.margin < 0.0:
            raise InvalidInputError("SizingScenario: margin must be >= 0")
        if not 0.0 < self.wind_aux_ratio < 1.0:
            raise InvalidInputError("SizingScenario: wind_aux_ratio must be in (0, 1)")
        if self.rating_granularity <= 0.0:
            raise InvalidInputError("SizingScenario: rating_granularity must be > 0")
        if min(self.dfig_rating, self.hydrogen_aux_q, self.secondary_load) < 0.0:
            raise InvalidInputError("SizingScenario: loads and ratings must be >= 0")
        if self.lsc_standby_power < 0.0:
            raise InvalidInputError("SizingScenario: lsc_standby_power must be >= 0")


class BlackstartPower(NamedTuple):
    p_mw: float
    q_mvar: float


@dataclass(frozen=True)
class LossDecomposition:
    transformer_excitation_mvar: float
    line_charging_mvar: float
    series_loss_mw: float
    series_loss_mvar: float
    lsc_standby_mw: float


@dataclass(frozen=True)
class SizingReport:
    p_min: float
    q_min: float
    s_min: float
    margin: float
    granularity: float
    rating: float
    losses: LossDecomposition
    loads: dict[str, float]
    solution: NetworkSolution

    @property
    def load_total_mw(self) -> float:
        return sum(self.loads.values())


def wind_aux_load(dfig_rating: float, ratio: float) -> float:
    return dfig_rating * ratio


def aux_ratio(table: AuxLoadTable, rating_mw: float) -> float:
    """Measured auxiliary total of one turbine as a fraction of its rating."""

    if rating_mw <= 0.0:
        raise InvalidInputError("Rating must be > 0")
    return table.total_kw / 1000.0 / rating_mw


def hydrogen_aux_load(table: AuxLoadTable) -> float:
    return table.total_kw / 1000.0


def scenario_loads(scenario: SizingScenario) -> dict[str, complex]:
    """Physical load demand (MW + j MVar) per load group."""

    hydrogen_q = scenario.hydrogen_aux_q + scenario.hydrogen_aux.total_kvar / 1000.0
    return {
        "wind_aux": complex(
            wind_aux_load(scenario.dfig_rating, scenario.wind_aux_ratio), 0.0
        ),
        "lsc_standby": complex(scenario.lsc_standby_power, 0.0),
        "hydrogen_aux": complex(
            hydrogen_aux_load(scenario.hydrogen_aux) + scenario.secondary_load,
            hydrogen_q,
        ),
    }


def build_blackstart_network(scenario: SizingScenario) -> Network:
    template = scenario.network_template
    buses = scenario.buses

    if not buses.distinct():
        raise InvalidInputError("Sizing buses must be four distinct buses")
    if max(buses.wind_aux, buses.dfig, buses.hydrogen_aux, buses.reference) >= (
        template.n_buses
    ):
        raise InvalidInputError("Sizing bus outside the network template")

    loads = scenario_loads(scenario)
    demand = {
        buses.wind_aux: loads["wind_aux"],
        buses.dfig: loads["lsc_standby"],
        buses.hydrogen_aux: loads["hydrogen_aux"],
    }

    specs = []
    for bus in template.buses:
        if bus.id == buses.reference:
            specs.append(
                BusSpec(
                    id=bus.id,
                    role=BusRole.REFERENCE,
                    v_set=bus.v_set,
                    angle_set=bus.angle_set,
                    name=bus.name,
                )
            )
            continue
        load = demand.get(bus.id, 0j)
        specs.append(
            BusSpec(
                id=bus.id,
                role=BusRole.PQ,
                p_inject=-to_per_unit(load.real, template.s_base),
                q_inject=-to_per_unit(load.imag, template.s_base),
                name=bus.name,
            )
        )

    network = replace(template, buses=tuple(specs))
    network.validate()
    return network


def required_blackstart_power(
    scenario: SizingScenario, options: FlowOptions = FlowOptions()
) -> BlackstartPower:
    solution = solve(build_blackstart_network(scenario), options)
    s = solution.to_mva(solution.reference_injection)
    return BlackstartPower(p_mw=s.real, q_mvar=s.imag)


def apparent_power(p_min: float, q_min: float) -> float:
    return math.hypot(p_min, q_min)


def pemfc_rating(
    p_min: float, q_min: float, margin: float, granularity: float
) -> float:
    """
    Standard rating for the black-start source: active requirement plus margin, rounded to the nearest rating step. `q_min` does not enter the rating; it is carried by the report as part of the apparent-power requirement.
    """

    if granularity <= 0.0:
        raise InvalidInputError("Rating granularity must be > 0")
    if min(p_min, q_min, margin) < 0.0:
        raise InvalidInputError("Rating inputs must be >= 0")

    steps = math.floor(p_min * (1.0 + margin) / granularity + 0.5)
    return round(steps * granularity, 9)


def loss_decomposition(
    solution: NetworkSolution, scenario: SizingScenario
) -> LossDecomposition:
    excitation = sum(
        f.q_shunt for f in solution.branch_flows if f.kind == BranchKind.TRANSFORMER
    )
    charging = sum(f.q_shunt for f in solution.branch_flows if f.kind == BranchKind.LINE)
    series = sum((f.series_loss for f in solution.branch_flows), 0j)

    return LossDecomposition(
        transformer_excitation_mvar=excitation * solution.s_base,
        line_charging_mvar=charging * solution.s_base,
        series_loss_mw=series.real * solution.s_base,
        series_loss_mvar=series.imag * solution.s_base,
        lsc_standby_mw=scenario.lsc_standby_power,
    )


def size(
    scenario: SizingScenario,
    margin: float | None = None,
    options: FlowOptions = FlowOptions(),
) -> SizingReport:
    margin = scenario.margin if margin is None else margin
    solution = solve(build_blackstart_network(scenario), options)
    s_min = solution.to_mva(solution.reference_injection)
    p_min, q_min = s_min.real, s_min.imag

    rating = pemfc_rating(
        max(p_min, 0.0), max(q_min, 0.0), margin, scenario.rating_granularity
    )
    log.info(
        f"black-start requirement {p_min:.4f} MW / {q_min:.4f} MVar, rating {rating} MW"
    )

    return SizingReport(
        p_min=p_min,
        q_min=q_min,
        s_min=apparent_power(p_min, q_min),
        margin=margin,
        granularity=scenario.rating_granularity,
        rating=rating,
        losses=loss_decomposition(solution, scenario),
        loads={name: load.real for name, load in scenario_loads(scenario).items()},
        solution=solution,
    )
