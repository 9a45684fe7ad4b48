"""Newton-Raphson AC power flow in polar coordinates."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from h2blackstart.domain.constants import BranchKind, BusRole
from h2blackstart.domain.exceptions import InvalidInputError, NonConvergenceError
from h2blackstart.grid.netmodel import Network, assemble_ybus, branch_admittance

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e10


@dataclass(frozen=True)
class FlowOptions:
    tolerance: float = 1e-8
    max_iterations: int = 30
    flat_start: bool = True

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise InvalidInputError("FlowOptions: tolerance must be > 0")
        if self.max_iterations < 1:
            raise InvalidInputError("FlowOptions: max_iterations must be >= 1")


@dataclass(frozen=True)
class BranchFlow:
    index: int
    name: str
    from_bus: int
    to_bus: int
    kind: BranchKind
    s_from: complex
    s_to: complex
    q_shunt: float = 0.0

    @property
    def loss(self) -> complex:
        return self.s_from + self.s_to

    @property
    def series_loss(self) -> complex:
        return self.loss - 1j * self.q_shunt

    @property
    def s_forward(self) -> complex:
        """Flow leaving the lower-numbered end, the positive branch direction."""

        return self.s_from if self.from_bus <= self.to_bus else self.s_to


@dataclass(frozen=True)
class NetworkSolution:
    voltages: np.ndarray
    iterations: int
    mismatch: float
    branch_flows: tuple[BranchFlow, ...]
    loss_total: complex
    reference_injection: complex
    injections: np.ndarray
    trace: tuple[float, ...] = ()
    reference_bus: int = 0
    s_base: float = 1.0

    def to_mva(self, value: complex) -> complex:
        return value * self.s_base


def initial_voltages(network: Network, flat_start: bool = True) -> np.ndarray:
    vm = np.ones(network.n_buses)
    va = np.zeros(network.n_buses)

    for bus in network.buses:
        if bus.role == BusRole.REFERENCE:
            vm[bus.id] = bus.v_set
            va[bus.id] = bus.angle_set
        elif bus.role == BusRole.PV:
            vm[bus.id] = bus.v_set
        elif not flat_start:
            vm[bus.id] = bus.v_set
            va[bus.id] = bus.angle_set

    return vm * np.exp(1j * va)


def jacobian(
    network: Network,
    vm: np.ndarray,
    va: np.ndarray,
    ybus: np.ndarray | None = None,
) -> np.ndarray:
    """
    Derivative of the mismatch vector [dP(pv+pq), dQ(pq)] with respect to the state [angles(pv+pq), magnitudes(pq)].
    """

    if ybus is None:
        ybus = assemble_ybus(network)
    pvpq, pq = _partition(network)

    v = vm * np.exp(1j * va)
    ibus = ybus @ v
    v_norm = v / np.abs(v)

    ds_dva = 1j * np.diag(v) @ np.conj(np.diag(ibus) - ybus @ np.diag(v))
    ds_dvm = np.diag(v) @ np.conj(ybus @ np.diag(v_norm)) + np.conj(
        np.diag(ibus)
    ) @ np.diag(v_norm)

    j11 = ds_dva[np.ix_(pvpq, pvpq)].real
    j12 = ds_dvm[np.ix_(pvpq, pq)].real
    j21 = ds_dva[np.ix_(pq, pvpq)].imag
    j22 = ds_dvm[np.ix_(pq, pq)].imag

    return np.block([[j11, j12], [j21, j22]])


def mismatch(
    network: Network, voltages: np.ndarray, ybus: np.ndarray | None = None
) -> np.ndarray:
    if ybus is None:
        ybus = assemble_ybus(network)
    pvpq, pq = _partition(network)

    s_calc = voltages * np.conj(ybus @ voltages)
    s_spec = np.array([complex(b.p_inject, b.q_inject) for b in network.buses])
    delta = s_calc - s_spec

    return np.concatenate([delta.real[pvpq], delta.imag[pq]])


def solve(
    network: Network,
    options: FlowOptions = FlowOptions(),
    initial: np.ndarray | None = None,
) -> NetworkSolution:
    """
    Solve the power-balance equations of `network`. Passing `initial` warm-starts the iteration from a previous solution; reference and PV magnitudes are re-imposed on it.
    """

    network.validate()
    ybus = assemble_ybus(network)
    pvpq, pq = _partition(network)
    n_angles = len(pvpq)

    if initial is None:
        v = initial_voltages(network, flat_start=options.flat_start)
    else:
        if len(initial) != network.n_buses:
            raise InvalidInputError("Initial voltage vector has the wrong length")
        v = _impose_fixed(network, np.asarray(initial, dtype=complex))

    vm = np.abs(v)
    va = np.angle(v)

    trace: list[float] = []
    for iteration in range(options.max_iterations + 1):
        f = mismatch(network, v, ybus)
        norm = float(np.max(np.abs(f))) if f.size else 0.0
        trace.append(norm)
        log.debug(f"iteration {iteration}: mismatch {norm:.3e}")

        if norm <= options.tolerance:
            return _solution(network, ybus, v, iteration, norm, trace)
        if iteration == options.max_iterations:
            break
        if not np.isfinite(norm) or norm > DIVERGENCE_LIMIT:
            break

        try:
            dx = np.linalg.solve(jacobian(network, vm, va, ybus), -f)
        except np.linalg.LinAlgError:
            log.warning(f"singular Jacobian at iteration {iteration}")
            break

        va[pvpq] += dx[:n_angles]
        vm[pq] += dx[n_angles:]
        v = vm * np.exp(1j * va)

    raise NonConvergenceError(
        f"Power flow did not converge within {options.max_iterations} iterations "
        f"(last mismatch {trace[-1]:.3e})",
        trace=trace,
    )


def branch_flows(network: Network, voltages: np.ndarray) -> tuple[BranchFlow, ...]:
    if len(voltages) != network.n_buses:
        raise InvalidInputError("Voltage vector length must equal the bus count")

    flows = []
    for index, branch in enumerate(network.branches):
        if not branch.in_service:
            flows.append(
                BranchFlow(
                    index, branch.label, branch.from_bus, branch.to_bus, branch.kind, 0j, 0j
                )
            )
            continue

        block = branch_admittance(branch)
        v_f = voltages[branch.from_bus]
        v_t = voltages[branch.to_bus]
        i_f = block[0, 0] * v_f + block[0, 1] * v_t
        i_t = block[1, 0] * v_f + block[1, 1] * v_t
        q_shunt = -branch.b_c / 2.0 * (abs(v_f) ** 2 / branch.tau**2 + abs(v_t) ** 2)

        flows.append(
            BranchFlow(
                index=index,
                name=branch.label,
                from_bus=branch.from_bus,
                to_bus=branch.to_bus,
                kind=branch.kind,
                s_from=complex(v_f * np.conj(i_f)),
                s_to=complex(v_t * np.conj(i_t)),
                q_shunt=float(q_shunt),
            )
        )

    return tuple(flows)


def _partition(network: Network) -> tuple[list[int], list[int]]:
    pv = network.buses_with_role(BusRole.PV)
    pq = network.buses_with_role(BusRole.PQ)
    return sorted(pv + pq), pq


def _impose_fixed(network: Network, v: np.ndarray) -> np.ndarray:
    vm = np.abs(v)
    va = np.angle(v)
    for bus in network.buses:
        if bus.role == BusRole.REFERENCE:
            vm[bus.id] = bus.v_set
            va[bus.id] = bus.angle_set
        elif bus.role == BusRole.PV:
            vm[bus.id] = bus.v_set
    # a dead bus from a previous solve would make the Jacobian singular
    vm[vm < 0.5] = 1.0
    return vm * np.exp(1j * va)


def _solution(
    network: Network,
    ybus: np.ndarray,
    v: np.ndarray,
    iterations: int,
    norm: float,
    trace: list[float],
) -> NetworkSolution:
    injections = v * np.conj(ybus @ v)
    flows = branch_flows(network, v)
    ref = network.reference_bus

    return NetworkSolution(
        voltages=v,
        iterations=iterations,
        mismatch=norm,
        branch_flows=flows,
        loss_total=complex(sum(flow.loss for flow in flows)),
        reference_injection=complex(injections[ref]),
        injections=injections,
        trace=tuple(trace),
        reference_bus=ref,
        s_base=network.s_base,
    )
