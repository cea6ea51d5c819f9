"""Centrality score rendering: ``state<TAB>score`` TSV and its JSON envelope."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict

from core.centrality import CentralityVector

CONTENT_TYPE = "text/tab-separated-values"


def format_score(value: float) -> str:
    """Decimal with 12 significant digits."""
    return f"{value:.12g}"


def centrality_tsv(vector: CentralityVector) -> str:
    """One ``state\\tscore`` line per state in canonical order."""
    return "".join(f"{state}\t{format_score(score)}\n" for state, score in vector.rows())


def centrality_envelope(vector: CentralityVector) -> Dict[str, Any]:
    return {
        "kind": "centrality",
        "measure": vector.measure.value,
        "model": vector.label,
        "order": vector.order,
        "content_type": CONTENT_TYPE,
        "payload": centrality_tsv(vector),
    }


def render(vector: CentralityVector, fmt: str = "tsv") -> str:
    if fmt == "json":
        return json.dumps(centrality_envelope(vector), sort_keys=True, ensure_ascii=False) + "\n"
    return centrality_tsv(vector)


def write_text(text: str, out_path: Path) -> Path:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return out_path
