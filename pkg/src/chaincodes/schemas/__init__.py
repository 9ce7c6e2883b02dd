"""JSON schemas for complexes, codes and command reports."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

NAMES = ("sparse_matrix", "complex", "code", "report")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())


@lru_cache(maxsize=None)
def _registry() -> Registry:
    return Registry().with_resources(
        (f"{n}.schema.json", Resource.from_contents(load(n))) for n in NAMES)


def validate(obj: dict, name: str = "report") -> None:
    """Raise jsonschema.ValidationError if ``obj`` does not match the named schema."""
    jsonschema.Draft202012Validator(load(name), registry=_registry()).validate(obj)
