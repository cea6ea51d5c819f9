from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict

from jsonschema import Draft202012Validator

from pathrank_logging.errors import InputError

_SCHEMAS: dict[str, Dict[str, Any]] = {}
_BASE = Path(__file__).resolve().parents[1] / "schemas"


def _load(name: str) -> Dict[str, Any]:
    p = _BASE / f"{name}.schema.json"
    if not p.exists():
        raise InputError(f"no schema named {name!r}")
    schema = json.loads(p.read_text(encoding="utf-8"))
    Draft202012Validator.check_schema(schema)
    return schema


def validate_document(name: str, payload: Any) -> None:
    """Validate ``payload`` against ``schemas/<name>.schema.json``."""
    schema = _SCHEMAS.get(name)
    if schema is None:
        schema = _load(name)
        _SCHEMAS[name] = schema
    errors = sorted(
        Draft202012Validator(schema).iter_errors(payload), key=lambda e: [str(p) for p in e.absolute_path]
    )
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise InputError(f"{name} document invalid at {where}: {first.message}")
