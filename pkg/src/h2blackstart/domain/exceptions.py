from __future__ import annotations

from typing import Any


class BlackstartError(Exception):
    """Base class of every error raised by h2blackstart."""

    # set on the way up: failing strategy and the run recorded before the failure
    strategy: str | None = None
    run: Any = None


class InvalidInputError(BlackstartError, ValueError):
    pass


class ScenarioError(BlackstartError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.reason = message


class ConfigurationError(ScenarioError):
    pass


class NonConvergenceError(BlackstartError):
    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = list(trace)

    @property
    def iterations(self) -> int:
        return max(len(self.trace) - 1, 0)


class SequencingError(BlackstartError):
    pass


class SequencerTimeout(BlackstartError):
    def __init__(self, message: str, state: Any = None, run: Any = None):
        super().__init__(message)
        self.state = state
        self.run = run


class SimulationFault(BlackstartError):
    def __init__(
        self,
        message: str,
        t: float,
        last_good: Any = None,
        cause: BaseException | None = None,
    ):
        super().__init__(f"t={t:.6g} s: {message}")
        self.t = t
        self.last_good = last_good
        self.cause = cause


class BlackoutFault(SimulationFault):
    pass
