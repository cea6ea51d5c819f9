"""Ground truth, prediction projection and top-fraction AUC."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping

import numpy as np
from scipy.stats import rankdata

from pathrank_logging.errors import EvaluationError, InputError

from .centrality import CentralityVector, compute
from .measures import Measure
from .path_data import PathDataset
from .states import parse_state, state_key

# Guards ceil() against products like 0.1 * 30 landing just above an integer.
_CEIL_SLACK = 1e-9


def ground_truth(test: PathDataset, measure: Measure, h: int = 1) -> CentralityVector:
    """Path-model ``measure`` on the test paths; its keys are the truth states."""

    if test.is_empty():
        raise InputError("ground truth needs a non-empty test set")
    return compute(measure, test, h)


@dataclass(frozen=True)
class Projection:
    vector: CentralityVector
    unmatched: frozenset[str]


def project_prediction(pred: CentralityVector, truth_states: Iterable[str]) -> Projection:
    """Give every truth state the score of its longest suffix present in ``pred``.

    Truth states without any matching suffix score 0 and are listed in
    ``unmatched``.
    """

    scores = pred.scores
    longest = max((len(parse_state(k)) for k in scores), default=0)
    projected: Dict[str, float] = {}
    unmatched = set()
    for key in truth_states:
        state = parse_state(key)
        for length in range(min(len(state), longest), 0, -1):
            candidate = state_key(state[-length:])
            if candidate in scores:
                projected[key] = scores[candidate]
                break
        else:
            projected[key] = 0.0
            unmatched.add(key)
    order = max((len(parse_state(k)) for k in projected), default=pred.order)
    vector = CentralityVector(
        pred.measure, pred.model_kind, order, projected, model_order=pred.model_order
    )
    return Projection(vector, frozenset(unmatched))


def positives_count(m: int, top_fraction: float) -> int:
    return max(1, math.ceil(top_fraction * m - _CEIL_SLACK)) if m else 0


def top_labels(truth: CentralityVector | Mapping[str, float], top_fraction: float) -> Dict[str, int]:
    """Label the ``ceil(top_fraction * m)`` best states 1; ties go to the canonically smallest."""

    scores = truth.scores if isinstance(truth, CentralityVector) else truth
    if not scores:
        raise EvaluationError("cannot label an empty ground truth")
    if not 0.0 < top_fraction < 1.0:
        raise EvaluationError(f"top_fraction must lie strictly between 0 and 1, got {top_fraction}")
    ranked = sorted(scores, key=lambda k: (-scores[k], k))
    cutoff = positives_count(len(ranked), top_fraction)
    positives = set(ranked[:cutoff])
    return {k: int(k in positives) for k in sorted(scores)}


def auc(scores: CentralityVector | Mapping[str, float], labels: Mapping[str, int]) -> float:
    """Probability that a random positive outranks a random negative; ties count one half.

    Scores are compared at the 12 significant digits they are reported with, so
    models that agree up to rounding rank states identically.
    """

    values = scores.scores if isinstance(scores, CentralityVector) else scores
    keys = sorted(labels)
    flags = np.array([labels[k] == 1 for k in keys], dtype=bool)
    positives = int(flags.sum())
    negatives = len(keys) - positives
    if not positives or not negatives:
        raise EvaluationError(
            f"AUC needs both classes; got {positives} positive and {negatives} negative labels"
        )
    ranks = rankdata([float(f"{values.get(k, 0.0):.12g}") for k in keys], method="average")
    u = ranks[flags].sum() - positives * (positives + 1) / 2.0
    return float(u / (positives * negatives))


__all__ = [
    "Projection",
    "ground_truth",
    "project_prediction",
    "positives_count",
    "top_labels",
    "auc",
]
