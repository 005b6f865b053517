"""The JSON schemas shipped with the command line outputs."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

__all__ = ["SCHEMAS", "load_schema", "validate"]

SCHEMAS = ("corpus", "denotation", "derivation", "error", "law_report", "run", "subtype", "verdict")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"no schema named {name!r}")
    return json.loads(resources.files("yaqbench").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8"))


def validate(name: str, obj) -> None:
    """Raise ``jsonschema.ValidationError`` when ``obj`` does not match."""
    schema = load_schema(name)
    jsonschema.validate(obj, schema, cls=jsonschema.Draft202012Validator)
