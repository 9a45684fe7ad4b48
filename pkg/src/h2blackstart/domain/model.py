from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from h2blackstart.blackstart.devices import DeviceParams
from h2blackstart.blackstart.sequencer import SCRIPTED_TIMES, TriggerThresholds
from h2blackstart.blackstart.sim import BlackstartScenario, SimOptions, WindProfile
from h2blackstart.blackstart.sizing import SizingScenario
from h2blackstart.domain.exceptions import ScenarioError
from h2blackstart.grid.netmodel import Network

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationInfo:
    """Provenance of a scenario: which parameters were fitted, to which targets."""

    source: str = ""
    fitted: tuple[str, ...] = ()
    verbatim: tuple[str, ...] = ()
    targets: Mapping[str, float] = field(default_factory=dict)
    tolerance: float = 0.05

    def misses(self, computed: Mapping[str, float]) -> dict[str, tuple[float, float]]:
        """Targets the computed values miss by more than the relative tolerance."""

        missed = {}
        for key, target in self.targets.items():
            if key not in computed:
                continue
            value = computed[key]
            if abs(value - target) > self.tolerance * (abs(target) or 1.0):
                missed[key] = (value, target)
        return missed


@dataclass(frozen=True)
class Scenario:
    name: str
    network: Network
    sizing: SizingScenario | None = None
    devices: DeviceParams = field(default_factory=DeviceParams)
    thresholds: TriggerThresholds = field(default_factory=TriggerThresholds)
    schedule: tuple[float, ...] = SCRIPTED_TIMES
    disconnect_pemfc: bool = True
    wind: WindProfile = field(default_factory=WindProfile)
    aux_pickup_time: float = 0.05
    options: SimOptions = field(default_factory=SimOptions)
    calibration: CalibrationInfo | None = None

    def require_sizing(self) -> SizingScenario:
        if self.sizing is None:
            raise ScenarioError(f"Scenario {self.name!r} has no sizing section", "$.sizing")
        return self.sizing

    def blackstart(self) -> BlackstartScenario:
        return BlackstartScenario.from_sizing(
            self.require_sizing(),
            devices=self.devices,
            thresholds=self.thresholds,
            wind=self.wind,
            schedule=self.schedule,
            disconnect_pemfc=self.disconnect_pemfc,
            aux_pickup_time=self.aux_pickup_time,
        )

    def sim_options(self, **overrides: Any) -> SimOptions:
        """Scenario simulation options with the given non-None values replaced."""

        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self.options, **changes)
