from dataclasses import dataclass, field

from h2blackstart.adapters.output import OutputWriter
from h2blackstart.adapters.repository import (
    AbstractScenarioRepository,
    BundledScenarioRepository,
)


@dataclass
class Dependencies:
    repository: AbstractScenarioRepository = field(
        default_factory=BundledScenarioRepository
    )
    writer: OutputWriter = field(default_factory=OutputWriter)
