"""Experiment report rendering: JSON document and the measure x model matrix."""
from __future__ import annotations

import json
from typing import Dict, Tuple

from core.experiment import RankingReport
from core.schema import validate_document

MISSING = "-"


def report_payload(report: RankingReport) -> Dict:
    payload = report.to_dict()
    validate_document("report", payload)
    return payload


def report_json(report: RankingReport) -> str:
    return json.dumps(report_payload(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_matrix_tsv(report: RankingReport) -> str:
    """Rows ``(order, measure)``, columns ``N, M1..MK, P``; cells ``mean (std)`` of the AUC."""

    columns = list(report.config.models)
    summary: Dict[Tuple[int, str, str], str] = {}
    for row in report.summary():
        if row.mean is not None:
            summary[(row.order, row.measure, row.model)] = f"{row.mean:.4f} ({row.std:.4f})"

    lines = ["\t".join(["order", "measure", *columns])]
    for order in report.config.ground_truth_orders:
        for measure in report.config.measures:
            cells = [summary.get((order, measure.value, column), MISSING) for column in columns]
            lines.append("\t".join([str(order), measure.value, *cells]))
    return "\n".join(lines) + "\n"
