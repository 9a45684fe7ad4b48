import json
import os
import pathlib
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import jsonschema.exceptions
import ruamel.yaml
import ruamel.yaml.error

from h2blackstart.config.scenario import build_scenario
from h2blackstart.domain.exceptions import ScenarioError
from h2blackstart.domain.model import Scenario


@dataclass
class Config:
    schema: dict[str, Any] = field(init=False)
    content: Any
    name: str = "scenario"

    def __post_init__(self):
        self.schema = self.get_schema()

    @classmethod
    def read(cls, filepath: str | os.PathLike):
        try:
            with open(filepath, "rt", encoding="utf-8") as f:
                yaml = ruamel.yaml.YAML(typ="safe")
                content = yaml.load(f.read())
        except ruamel.yaml.error.YAMLError as err:
            raise ScenarioError(f"Malformed YAML: {err}") from err
        except OSError as err:
            raise ScenarioError(f"Cannot read {filepath}: {err.strerror}") from err

        return cls(content=content, name=pathlib.Path(filepath).stem)

    @staticmethod
    def get_schema() -> dict[str, Any]:
        path = os.path.join(os.path.dirname(__file__), "schema.json")

        with open(path, "rt", encoding="utf-8") as f:
            return json.loads(f.read())

    def errors(self) -> list[jsonschema.exceptions.ValidationError]:
        validator = jsonschema.Draft7Validator(self.schema)
        return sorted(validator.iter_errors(self.content), key=lambda e: e.json_path)

    def validate(self) -> tuple[bool, str]:
        errors = self.errors()
        if errors:
            err = jsonschema.exceptions.best_match(errors)
            return False, f"{err.json_path}: {err.message}"

        return True, "Validation successful, no errors"

    def parse(self) -> Scenario:
        errors = self.errors()
        if errors:
            err = jsonschema.exceptions.best_match(errors)
            raise ScenarioError(err.message, location=err.json_path)

        return build_scenario(self.content, name=self.name)
