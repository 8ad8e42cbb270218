"""JSON schemas for every document the command-line tool emits."""

import json
from importlib import resources

NAMES = ("classes", "estimate", "links", "matrix", "overview", "parse_report", "profile", "sunburst")


def load_schema(name):
    if name not in NAMES:
        raise ValueError(f"unknown schema {name!r}; choose from {NAMES}")
    with resources.files(__name__).joinpath(f"{name}.schema.json").open(encoding="utf-8") as fh:
        return json.load(fh)
