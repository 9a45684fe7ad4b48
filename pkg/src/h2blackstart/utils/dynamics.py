import math


def lag_factor(dt: float, tau: float) -> float:
    """
    Fraction of the remaining error removed by a first-order lag in one step of length dt (exact zero-order-hold discretisation).
    """

    if tau <= 0.0:
        return 1.0
    return 1.0 - math.exp(-dt / tau)


def lag(value: float, target: float, dt: float, tau: float) -> float:
    return value + lag_factor(dt, tau) * (target - value)


def lag_complex(value: complex, target: complex, dt: float, tau: float) -> complex:
    return value + lag_factor(dt, tau) * (target - value)


def rate_limit(value: float, target: float, dt: float, rate: float) -> float:
    if rate <= 0.0:
        return target
    step = rate * dt
    return value + max(-step, min(step, target - value))


def clamp(value: float, lower: float, upper: float) -> tuple[float, bool]:
    clamped = min(max(value, lower), upper)
    return clamped, clamped != value
