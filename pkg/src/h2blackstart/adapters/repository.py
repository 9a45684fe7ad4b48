import abc
import logging
import os
import pathlib

from h2blackstart.config.config import Config
from h2blackstart.domain.exceptions import ScenarioError
from h2blackstart.domain.model import Scenario

log = logging.getLogger(__name__)

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "scenarios")
SCENARIO_SUFFIXES = (".yaml", ".yml")


class AbstractScenarioRepository(abc.ABC):
    def get(self, reference: str) -> Scenario:
        scenario = self._get(reference)
        return scenario

    def list_all(self) -> list[str]:
        names = self._list_all()
        return names

    @abc.abstractmethod
    def _get(self, reference: str) -> Scenario:
        raise NotImplementedError

    @abc.abstractmethod
    def _list_all(self) -> list[str]:
        raise NotImplementedError


class BundledScenarioRepository(AbstractScenarioRepository):
    """Scenarios given as file paths or as names of the files shipped in `scenarios/`."""

    def __init__(self, root: str | os.PathLike = SCENARIO_DIR):
        super().__init__()
        self.root = pathlib.Path(root)
        self.cache: dict[str, Scenario] = {}

    def resolve(self, reference: str | os.PathLike) -> pathlib.Path:
        path = pathlib.Path(reference)
        if path.is_file():
            return path

        for suffix in ("",) + SCENARIO_SUFFIXES:
            candidate = self.root / f"{reference}{suffix}"
            if candidate.is_file():
                return candidate

        bundled = ", ".join(self.list_all()) or "none"
        raise ScenarioError(
            f"No scenario file or bundled scenario named {str(reference)!r} "
            f"(bundled: {bundled})"
        )

    def _get(self, reference: str) -> Scenario:
        path = self.resolve(reference)
        key = str(path.resolve())
        if key not in self.cache:
            log.debug(f"loading scenario from {path}")
            self.cache[key] = Config.read(path).parse()
        return self.cache[key]

    def _list_all(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(
            p.stem for p in self.root.iterdir() if p.suffix in SCENARIO_SUFFIXES
        )


class InMemoryScenarioRepository(AbstractScenarioRepository):
    def __init__(self):
        super().__init__()
        self.repo: dict[str, Scenario] = {}

    def add(self, scenario: Scenario, name: str | None = None) -> None:
        self.repo[name or scenario.name] = scenario

    def _get(self, reference: str) -> Scenario:
        try:
            return self.repo[str(reference)]
        except KeyError:
            raise ScenarioError(f"Unknown scenario {str(reference)!r}") from None

    def _list_all(self) -> list[str]:
        return sorted(self.repo)
