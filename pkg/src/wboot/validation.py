"""JSON-schema validation for configs and reports."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

CONFIG_SCHEMA = "config.schema.json"
REPORT_SCHEMA = "report.schema.json"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(resources.files("wboot").joinpath("schemas", name).read_text())


@lru_cache(maxsize=None)
def _validator(name: str) -> jsonschema.protocols.Validator:
    registry = Registry().with_resources(
        (load_schema(s)["$id"], Resource.from_contents(load_schema(s))) for s in (CONFIG_SCHEMA, REPORT_SCHEMA)
    )
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=registry)


def validate_config(d: dict) -> None:
    """Raise :class:`jsonschema.ValidationError` if ``d`` is not a valid config."""
    _validator(CONFIG_SCHEMA).validate(d)


def validate_report(report: dict) -> None:
    """Raise :class:`jsonschema.ValidationError` if ``report`` is not a valid report."""
    _validator(REPORT_SCHEMA).validate(report)
