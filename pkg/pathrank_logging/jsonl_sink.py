"""Append-only JSONL sink utility."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable


def append_many(path: Path, records: Iterable[Dict[str, Any]]) -> int:
    """Append ``records`` in order and return how many were written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    written = 0
    with path.open("a", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            written += 1
    return written
