"""Network representation: buses, pi-model branches, per-unit bases and Y-bus assembly."""

from __future__ import annotations

import cmath
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from h2blackstart.domain.constants import BranchKind, BusRole
from h2blackstart.domain.exceptions import InvalidInputError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Branch:
    """Unified line/transformer pi-element.

    `b_c` is the total shunt susceptance, split half per end. Transformer
    magnetising branches are expressed as a negative `b_c`.
    """

    from_bus: int
    to_bus: int
    r_s: float
    x_s: float
    b_c: float = 0.0
    tau: float = 1.0
    theta_shift: float = 0.0
    in_service: bool = True
    name: str = ""
    kind: BranchKind = BranchKind.LINE

    def __post_init__(self):
        if self.tau <= 0.0:
            raise InvalidInputError(f"Branch {self.label}: tap ratio must be > 0")
        if self.r_s < 0.0:
            raise InvalidInputError(f"Branch {self.label}: resistance must be >= 0")
        if self.r_s == 0.0 and self.x_s == 0.0:
            raise InvalidInputError(f"Branch {self.label}: zero series impedance")

    @property
    def label(self) -> str:
        return self.name or f"{self.from_bus}-{self.to_bus}"

    @property
    def y_series(self) -> complex:
        return 1.0 / complex(self.r_s, self.x_s)

    @property
    def tap(self) -> complex:
        return self.tau * cmath.exp(1j * self.theta_shift)


@dataclass(frozen=True)
class BusSpec:
    id: int
    role: BusRole = BusRole.PQ
    v_set: float = 1.0
    angle_set: float = 0.0
    p_inject: float = 0.0
    q_inject: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.role != BusRole.PQ and self.v_set <= 0.0:
            raise InvalidInputError(f"Bus {self.label}: v_set must be > 0")

    @property
    def label(self) -> str:
        return self.name or str(self.id)


@dataclass(frozen=True)
class Network:
    buses: tuple[BusSpec, ...]
    branches: tuple[Branch, ...] = ()
    s_base: float = 10.0
    v_bases: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.v_bases:
            object.__setattr__(self, "v_bases", tuple(1.0 for _ in self.buses))
        else:
            object.__setattr__(self, "v_bases", tuple(self.v_bases))

        if self.s_base <= 0.0:
            raise InvalidInputError("Network: s_base must be > 0")
        if len(self.v_bases) != len(self.buses):
            raise InvalidInputError("Network: one voltage base per bus required")
        for index, bus in enumerate(self.buses):
            if bus.id != index:
                raise InvalidInputError(
                    f"Network: bus ids must be dense 0-based indices, got {bus.id} at {index}"
                )
        for branch in self.branches:
            for end in (branch.from_bus, branch.to_bus):
                if not 0 <= end < len(self.buses):
                    raise InvalidInputError(
                        f"Branch {branch.label}: unknown bus {end}"
                    )

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def names(self) -> list[str]:
        return [bus.label for bus in self.buses]

    def index_of(self, name: str) -> int:
        for bus in self.buses:
            if bus.name == name:
                return bus.id
        raise InvalidInputError(f"Network: no bus named {name!r}")

    def buses_with_role(self, role: BusRole) -> list[int]:
        return [bus.id for bus in self.buses if bus.role == role]

    @property
    def reference_bus(self) -> int:
        refs = self.buses_with_role(BusRole.REFERENCE)
        if len(refs) != 1:
            raise InvalidInputError(
                f"Network: exactly one reference bus required, found {len(refs)}"
            )
        return refs[0]

    def validate(self) -> None:
        """Check the invariants that construction alone cannot guarantee."""

        _ = self.reference_bus
        if not is_connected(self):
            raise InvalidInputError("Network: in-service branch graph is disconnected")

    def with_bus(self, bus: BusSpec) -> Network:
        buses = list(self.buses)
        buses[bus.id] = bus
        return replace(self, buses=tuple(buses))

    def with_branch_service(self, index: int, in_service: bool) -> Network:
        branches = list(self.branches)
        branches[index] = replace(branches[index], in_service=in_service)
        return replace(self, branches=tuple(branches))

    def rebase(self, s_base: float) -> Network:
        """Express the same physical network on another system power base."""

        if s_base <= 0.0:
            raise InvalidInputError("Network: s_base must be > 0")
        ratio = s_base / self.s_base
        branches = tuple(
            replace(b, r_s=b.r_s * ratio, x_s=b.x_s * ratio, b_c=b.b_c / ratio)
            for b in self.branches
        )
        buses = tuple(
            replace(bus, p_inject=bus.p_inject / ratio, q_inject=bus.q_inject / ratio)
            for bus in self.buses
        )
        return replace(self, buses=buses, branches=branches, s_base=s_base)


def to_per_unit(value: float | complex, base: float) -> float | complex:
    if base <= 0.0:
        raise InvalidInputError(f"Base must be > 0, got {base}")
    return value / base


def from_per_unit(value: float | complex, base: float) -> float | complex:
    if base <= 0.0:
        raise InvalidInputError(f"Base must be > 0, got {base}")
    return value * base


def branch_admittance(branch: Branch) -> np.ndarray:
    if branch.r_s == 0.0 and branch.x_s == 0.0:
        raise InvalidInputError(f"Branch {branch.label}: zero series impedance")

    y_s = branch.y_series
    half_shunt = 1j * branch.b_c / 2.0
    tau = branch.tau
    shift = cmath.exp(1j * branch.theta_shift)

    return np.array(
        [
            [(y_s + half_shunt) / tau**2, -y_s / (tau * shift.conjugate())],
            [-y_s / (tau * shift), y_s + half_shunt],
        ],
        dtype=complex,
    )


def assemble_ybus(network: Network) -> np.ndarray:
    n = network.n_buses
    ybus = np.zeros((n, n), dtype=complex)

    for branch in network.branches:
        if not branch.in_service:
            continue
        block = branch_admittance(branch)
        ends = (branch.from_bus, branch.to_bus)
        for i in range(2):
            for k in range(2):
                ybus[ends[i], ends[k]] += block[i, k]

    return ybus


def adjacency(network: Network) -> dict[int, set[int]]:
    neighbours: dict[int, set[int]] = {bus.id: set() for bus in network.buses}
    for branch in network.branches:
        if branch.in_service:
            neighbours[branch.from_bus].add(branch.to_bus)
            neighbours[branch.to_bus].add(branch.from_bus)
    return neighbours


def is_connected(network: Network) -> bool:
    if network.n_buses == 0:
        return True

    neighbours = adjacency(network)
    seen = {0}
    queue = deque([0])
    while queue:
        bus = queue.popleft()
        for other in neighbours[bus] - seen:
            seen.add(other)
            queue.append(other)

    return len(seen) == network.n_buses


def transformer_tap(
    rated_kv: Sequence[float], v_base_from: float, v_base_to: float
) -> float:
    """Off-nominal tap magnitude of a transformer whose rated voltages differ from the bus voltage bases."""

    rated_from, rated_to = rated_kv
    if min(rated_from, rated_to, v_base_from, v_base_to) <= 0.0:
        raise InvalidInputError("Transformer voltages must be > 0")
    return (rated_from / v_base_from) / (rated_to / v_base_to)


def permute(network: Network, order: Iterable[int]) -> Network:
    """Renumber buses so that new bus `i` is old bus `order[i]`."""

    order = list(order)
    if sorted(order) != list(range(network.n_buses)):
        raise InvalidInputError("Permutation must cover every bus exactly once")
    new_index = {old: new for new, old in enumerate(order)}

    buses = tuple(replace(network.buses[old], id=new) for new, old in enumerate(order))
    branches = tuple(
        replace(b, from_bus=new_index[b.from_bus], to_bus=new_index[b.to_bus])
        for b in network.branches
    )
    v_bases = tuple(network.v_bases[old] for old in order)
    return replace(network, buses=buses, branches=branches, v_bases=v_bases)
