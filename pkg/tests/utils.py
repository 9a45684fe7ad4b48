import math
import os

import numpy as np
from scipy.optimize import bisect

from h2blackstart.domain.constants import BranchKind, BusRole
from h2blackstart.grid.netmodel import Branch, BusSpec, Network, assemble_ybus
from h2blackstart.grid.powerflow import mismatch

RESOURCES = os.path.join(os.path.dirname(__file__), "resources")


def resource(name: str) -> str:
    return os.path.join(RESOURCES, name)


def two_bus(
    r: float = 0.01,
    x: float = 0.05,
    p_load: float = 0.5,
    q_load: float = 0.2,
    b: float = 0.0,
    tau: float = 1.0,
) -> Network:
    return Network(
        buses=(
            BusSpec(0, BusRole.REFERENCE, v_set=1.0, name="a"),
            BusSpec(1, p_inject=-p_load, q_inject=-q_load, name="b"),
        ),
        branches=(Branch(0, 1, r_s=r, x_s=x, b_c=b, tau=tau, name="a-b"),),
        s_base=1.0,
    )


def three_bus(pv: bool = False) -> Network:
    return Network(
        buses=(
            BusSpec(0, BusRole.REFERENCE, v_set=1.02, name="slack"),
            BusSpec(
                1,
                BusRole.PV if pv else BusRole.PQ,
                v_set=1.01,
                p_inject=0.3,
                q_inject=0.0 if pv else 0.1,
                name="gen",
            ),
            BusSpec(2, p_inject=-0.9, q_inject=-0.3, name="load"),
        ),
        branches=(
            Branch(0, 1, r_s=0.02, x_s=0.06, b_c=0.03, name="l01"),
            Branch(
                0,
                2,
                r_s=0.01,
                x_s=0.08,
                b_c=-0.01,
                tau=1.025,
                theta_shift=math.radians(2.0),
                name="t02",
                kind=BranchKind.TRANSFORMER,
            ),
            Branch(1, 2, r_s=0.03, x_s=0.09, b_c=0.02, name="l12"),
        ),
        s_base=1.0,
    )


def random_network(seed: int, n_buses: int = 3) -> Network:
    """Meshed network of `n_buses` with bus 0 as reference and light random loads."""

    rng = np.random.default_rng(seed)
    buses = [BusSpec(0, BusRole.REFERENCE, v_set=float(rng.uniform(0.98, 1.04)))]
    for i in range(1, n_buses):
        buses.append(
            BusSpec(
                i,
                p_inject=float(-rng.uniform(0.05, 0.6)),
                q_inject=float(-rng.uniform(0.0, 0.3)),
            )
        )

    branches = []
    for i in range(1, n_buses):
        branches.append(
            Branch(
                int(rng.integers(0, i)),
                i,
                r_s=float(rng.uniform(0.005, 0.03)),
                x_s=float(rng.uniform(0.03, 0.12)),
                b_c=float(rng.uniform(0.0, 0.04)),
            )
        )
    if n_buses > 2:
        branches.append(
            Branch(
                n_buses - 1,
                0,
                r_s=float(rng.uniform(0.005, 0.03)),
                x_s=float(rng.uniform(0.03, 0.12)),
                tau=float(rng.uniform(0.95, 1.05)),
                kind=BranchKind.TRANSFORMER,
            )
        )
    return Network(buses=tuple(buses), branches=tuple(branches), s_base=1.0)


def gauss_seidel(network: Network, tol: float = 1e-13, max_iter: int = 200000) -> np.ndarray:
    """Reference solution by plain Gauss-Seidel sweeps, independent of the Newton solver."""

    ybus = assemble_ybus(network)
    v = np.array(
        [
            b.v_set * np.exp(1j * b.angle_set) if b.role != BusRole.PQ else 1.0 + 0j
            for b in network.buses
        ]
    )
    for b in network.buses:
        if b.role == BusRole.PV:
            v[b.id] = b.v_set

    for _ in range(max_iter):
        previous = v.copy()
        for b in network.buses:
            i = b.id
            if b.role == BusRole.REFERENCE:
                continue
            q = b.q_inject
            if b.role == BusRole.PV:
                q = float(np.imag(v[i] * np.conj(ybus[i] @ v)))
            s = complex(b.p_inject, q)
            others = ybus[i] @ v - ybus[i, i] * v[i]
            v[i] = (np.conj(s) / np.conj(v[i]) - others) / ybus[i, i]
            if b.role == BusRole.PV:
                v[i] = b.v_set * v[i] / abs(v[i])
        if np.max(np.abs(v - previous)) < tol:
            return v

    raise AssertionError("Gauss-Seidel oracle did not converge")


def two_bus_voltage_by_bisection(r: float, x: float, p_load: float, q_load: float) -> float:
    """High-voltage root of the two-bus receiving-end magnitude equation (sending end at 1 pu)."""

    a = 2.0 * (r * p_load + x * q_load) - 1.0
    c = (r * r + x * x) * (p_load * p_load + q_load * q_load)

    def g(u: float) -> float:
        return u * u + a * u + c

    vertex = -a / 2.0
    u = bisect(g, vertex, 1.0 + abs(a) + c, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return math.sqrt(u)


def finite_difference_jacobian(
    network: Network, vm: np.ndarray, va: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    pvpq = sorted(network.buses_with_role(BusRole.PV) + network.buses_with_role(BusRole.PQ))
    pq = network.buses_with_role(BusRole.PQ)

    def f(vm_, va_):
        return mismatch(network, vm_ * np.exp(1j * va_))

    columns = []
    for i in pvpq:
        up, down = va.copy(), va.copy()
        up[i] += h
        down[i] -= h
        columns.append((f(vm, up) - f(vm, down)) / (2 * h))
    for i in pq:
        up, down = vm.copy(), vm.copy()
        up[i] += h
        down[i] -= h
        columns.append((f(up, va) - f(down, va)) / (2 * h))
    return np.column_stack(columns)


def run_frame(run):
    return run.series.to_frame().set_index("t")
