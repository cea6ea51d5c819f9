"""The five path centralities on network, path and MOGen models.

Every measure takes an evaluation order ``h``.  Path-model measures are the
order-1 measures of ``window_sequences(ds, h)``; MOGen measures aggregate
their states by the last ``min(order, h)`` nodes, which yields exactly the
same state keys.  The network model only knows first-order nodes, so its
vectors always have order 1.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import singledispatch
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from pathrank_logging.errors import ConfigError, UnsupportedMeasureError

from .measures import Measure, ModelKind, parse_measure
from .mogen_model import FundamentalMatrix, MogenModel, fundamental_matrix
from .network_model import (
    Direction,
    NetworkModel,
    all_pairs_distances,
    harmonic_closeness,
    network_betweenness,
    project_distances,
)
from .path_data import PathDataset, window_sequences
from .states import state_key, suffix


@dataclass(frozen=True)
class CentralityVector:
    """Scores of one measure on one model at evaluation order ``order``."""

    measure: Measure
    model_kind: ModelKind
    order: int
    scores: Mapping[str, float] = field(repr=False)
    model_order: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "scores", MappingProxyType(dict(sorted(self.scores.items())))
        )

    @property
    def label(self) -> str:
        if self.model_kind is ModelKind.NETWORK:
            return "N"
        if self.model_kind is ModelKind.PATH:
            return "P"
        return f"M{self.model_order}"

    def rows(self) -> List[Tuple[str, float]]:
        """``(state, score)`` pairs in canonical state order."""
        return list(self.scores.items())

    def __len__(self) -> int:
        return len(self.scores)


def _check_order(h: int) -> None:
    if h < 1:
        raise ConfigError(f"evaluation order h must be at least 1, got {h}")


# ---------------------------------------------------------------------------
# Path model
# ---------------------------------------------------------------------------


def _occurrences(ds: PathDataset, h: int) -> Tuple[PathDataset, Dict[str, float]]:
    windowed = window_sequences(ds, h)
    occurrences: Dict[str, float] = defaultdict(float)
    for path in windowed:
        for node in path.nodes:
            occurrences[node] += path.frequency
    return windowed, occurrences


def _path_vector(measure: Measure, h: int, scores: Mapping[str, float]) -> CentralityVector:
    return CentralityVector(measure, ModelKind.PATH, h, scores)


def path_betweenness(ds: PathDataset, h: int = 1) -> CentralityVector:
    """Interior occurrences of every order-``h`` state per observed path."""

    _check_order(h)
    windowed, occurrences = _occurrences(ds, h)
    interior = dict.fromkeys(occurrences, 0.0)
    for path in windowed:
        for node in path.nodes[1:-1]:
            interior[node] += path.frequency
    total = ds.total
    return _path_vector(Measure.BETWEENNESS, h, {k: v / total for k, v in interior.items()})


def path_closeness(ds: PathDataset, h: int = 1, *, direction: Direction = "out") -> CentralityVector:
    _check_order(h)
    D = all_pairs_distances(window_sequences(ds, h))
    return _path_vector(Measure.CLOSENESS, h, harmonic_closeness(D, direction=direction))


def path_end_probability(ds: PathDataset, h: int = 1) -> CentralityVector:
    """Share of observed paths whose last order-``h`` state is the state."""

    _check_order(h)
    windowed, occurrences = _occurrences(ds, h)
    ends = dict.fromkeys(occurrences, 0.0)
    for path in windowed:
        ends[path.nodes[-1]] += path.frequency
    total = ds.total
    return _path_vector(Measure.END_PROBABILITY, h, {k: v / total for k, v in ends.items()})


def path_continuation_probability(ds: PathDataset, h: int = 1) -> CentralityVector:
    """Share of a state's occurrences that are followed by another state."""

    _check_order(h)
    windowed, occurrences = _occurrences(ds, h)
    continued = dict.fromkeys(occurrences, 0.0)
    for path in windowed:
        for node in path.nodes[:-1]:
            continued[node] += path.frequency
    return _path_vector(
        Measure.CONTINUATION_PROBABILITY,
        h,
        {k: continued[k] / occurrences[k] for k in occurrences},
    )


def path_reach_on_paths(ds: PathDataset, h: int = 1) -> CentralityVector:
    """Mean number of transitions that follow an occurrence of the state."""

    _check_order(h)
    windowed, occurrences = _occurrences(ds, h)
    remaining = dict.fromkeys(occurrences, 0.0)
    for path in windowed:
        last = path.length - 1
        for position, node in enumerate(path.nodes):
            remaining[node] += (last - position) * path.frequency
    return _path_vector(
        Measure.REACH, h, {k: remaining[k] / occurrences[k] for k in occurrences}
    )


# ---------------------------------------------------------------------------
# MOGen model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Groups:
    keys: Tuple[str, ...]
    inverse: np.ndarray

    @classmethod
    def of(cls, model: MogenModel, h: int) -> "_Groups":
        labels = [state_key(suffix(state, h)) for state in model.states]
        keys, inverse = np.unique(np.array(labels, dtype=object), return_inverse=True)
        return cls(tuple(str(k) for k in keys), inverse.ravel())

    def total(self, values: np.ndarray) -> Dict[str, float]:
        sums = np.bincount(self.inverse, weights=values, minlength=len(self.keys))
        return dict(zip(self.keys, (float(s) for s in sums)))

    def weighted_mean(self, values: np.ndarray, weights: np.ndarray) -> Dict[str, float]:
        # Plain mean for groups that are never visited.
        weight_sums = np.bincount(self.inverse, weights=weights, minlength=len(self.keys))
        weighted = np.bincount(self.inverse, weights=values * weights, minlength=len(self.keys))
        sizes = np.bincount(self.inverse, minlength=len(self.keys))
        plain = np.bincount(self.inverse, weights=values, minlength=len(self.keys)) / sizes
        means = np.where(
            weight_sums > 0, weighted / np.where(weight_sums > 0, weight_sums, 1.0), plain
        )
        return dict(zip(self.keys, (float(m) for m in means)))


def _mogen_vector(
    measure: Measure, model: MogenModel, h: int, scores: Mapping[str, float]
) -> CentralityVector:
    return CentralityVector(measure, ModelKind.MOGEN, h, scores, model_order=model.K)


def _visits(model: MogenModel, F: Optional[FundamentalMatrix]) -> Tuple[FundamentalMatrix, np.ndarray]:
    F = F if F is not None else fundamental_matrix(model)
    return F, np.asarray(F.left_multiply(model.S), dtype=float)


def mogen_betweenness(
    model: MogenModel, F: Optional[FundamentalMatrix] = None, h: int = 1
) -> CentralityVector:
    """Expected interior visits: ``S·F - s - e + s·R`` summed per order-``h`` key.

    ``s·R`` is the probability of a single-state path, which is counted both
    as start and as end.
    """

    _check_order(h)
    F, visits = _visits(model, F)
    interior = visits - model.S - visits * model.R + model.S * model.R
    interior = np.clip(interior, 0.0, None)
    return _mogen_vector(Measure.BETWEENNESS, model, h, _Groups.of(model, h).total(interior))


def mogen_closeness(
    model: MogenModel, h: int = 1, *, direction: Direction = "out"
) -> CentralityVector:
    _check_order(h)
    D = project_distances(all_pairs_distances(model), h)
    return _mogen_vector(Measure.CLOSENESS, model, h, harmonic_closeness(D, direction=direction))


def mogen_end_probability(
    model: MogenModel, F: Optional[FundamentalMatrix] = None, h: int = 1
) -> CentralityVector:
    _check_order(h)
    F, visits = _visits(model, F)
    ends = np.clip(visits * model.R, 0.0, 1.0)
    return _mogen_vector(Measure.END_PROBABILITY, model, h, _Groups.of(model, h).total(ends))


def mogen_continuation_probability(
    model: MogenModel, F: Optional[FundamentalMatrix] = None, h: int = 1
) -> CentralityVector:
    """``1 - R`` per state, averaged per key with visit weights."""

    _check_order(h)
    F, visits = _visits(model, F)
    scores = _Groups.of(model, h).weighted_mean(np.clip(1.0 - model.R, 0.0, 1.0), visits)
    return _mogen_vector(Measure.CONTINUATION_PROBABILITY, model, h, scores)


def mogen_reach(
    model: MogenModel, F: Optional[FundamentalMatrix] = None, h: int = 1
) -> CentralityVector:
    """Expected further transitions (``row sum of F - 1``), averaged per key with visit weights."""

    _check_order(h)
    F, visits = _visits(model, F)
    reach = np.clip(np.asarray(F.row_sums(), dtype=float) - 1.0, 0.0, None)
    scores = _Groups.of(model, h).weighted_mean(reach, visits)
    return _mogen_vector(Measure.REACH, model, h, scores)


# ---------------------------------------------------------------------------
# Network model
# ---------------------------------------------------------------------------


def network_betweenness_vector(model: NetworkModel) -> CentralityVector:
    return CentralityVector(Measure.BETWEENNESS, ModelKind.NETWORK, 1, network_betweenness(model))


def network_closeness(model: NetworkModel, *, direction: Direction = "out") -> CentralityVector:
    D = all_pairs_distances(model)
    return CentralityVector(
        Measure.CLOSENESS, ModelKind.NETWORK, 1, harmonic_closeness(D, direction=direction)
    )


# ---------------------------------------------------------------------------
# Dispatch by model type
# ---------------------------------------------------------------------------


@singledispatch
def betweenness(model: object, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise TypeError(f"betweenness is not defined for {type(model).__name__}")


@betweenness.register
def _(model: PathDataset, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return path_betweenness(model, h)


@betweenness.register
def _(model: MogenModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return mogen_betweenness(model, fundamental, h)


@betweenness.register
def _(model: NetworkModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return network_betweenness_vector(model)


@singledispatch
def closeness(
    model: object,
    h: int = 1,
    *,
    fundamental: Optional[FundamentalMatrix] = None,
    direction: Direction = "out",
) -> CentralityVector:
    raise TypeError(f"closeness is not defined for {type(model).__name__}")


@closeness.register
def _(model: PathDataset, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None, direction: Direction = "out") -> CentralityVector:
    return path_closeness(model, h, direction=direction)


@closeness.register
def _(model: MogenModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None, direction: Direction = "out") -> CentralityVector:
    return mogen_closeness(model, h, direction=direction)


@closeness.register
def _(model: NetworkModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None, direction: Direction = "out") -> CentralityVector:
    return network_closeness(model, direction=direction)


@singledispatch
def end_probability(model: object, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise TypeError(f"end_probability is not defined for {type(model).__name__}")


@end_probability.register
def _(model: PathDataset, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return path_end_probability(model, h)


@end_probability.register
def _(model: MogenModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return mogen_end_probability(model, fundamental, h)


@end_probability.register
def _(model: NetworkModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise UnsupportedMeasureError(Measure.END_PROBABILITY.value, ModelKind.NETWORK.value)


@singledispatch
def continuation_probability(model: object, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise TypeError(f"continuation_probability is not defined for {type(model).__name__}")


@continuation_probability.register
def _(model: PathDataset, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return path_continuation_probability(model, h)


@continuation_probability.register
def _(model: MogenModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return mogen_continuation_probability(model, fundamental, h)


@continuation_probability.register
def _(model: NetworkModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise UnsupportedMeasureError(Measure.CONTINUATION_PROBABILITY.value, ModelKind.NETWORK.value)


@singledispatch
def path_reach(model: object, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise TypeError(f"path_reach is not defined for {type(model).__name__}")


@path_reach.register
def _(model: PathDataset, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return path_reach_on_paths(model, h)


@path_reach.register
def _(model: MogenModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    return mogen_reach(model, fundamental, h)


@path_reach.register
def _(model: NetworkModel, h: int = 1, *, fundamental: Optional[FundamentalMatrix] = None) -> CentralityVector:
    raise UnsupportedMeasureError(Measure.REACH.value, ModelKind.NETWORK.value)


_MEASURES: Dict[Measure, Callable[..., CentralityVector]] = {
    Measure.BETWEENNESS: betweenness,
    Measure.CLOSENESS: closeness,
    Measure.END_PROBABILITY: end_probability,
    Measure.CONTINUATION_PROBABILITY: continuation_probability,
    Measure.REACH: path_reach,
}


def compute(
    measure: Measure | str,
    model: PathDataset | MogenModel | NetworkModel,
    h: int = 1,
    *,
    fundamental: Optional[FundamentalMatrix] = None,
    direction: Direction = "out",
) -> CentralityVector:
    """Compute ``measure`` on ``model`` at order ``h``.

    ``fundamental`` lets callers share one solve of ``F`` between MOGen measures.
    """

    _check_order(h)
    measure = parse_measure(measure)
    if measure is Measure.CLOSENESS:
        return closeness(model, h, fundamental=fundamental, direction=direction)
    return _MEASURES[measure](model, h, fundamental=fundamental)


__all__ = [
    "CentralityVector",
    "compute",
    "betweenness",
    "closeness",
    "end_probability",
    "continuation_probability",
    "path_reach",
    "path_betweenness",
    "path_closeness",
    "path_end_probability",
    "path_continuation_probability",
    "path_reach_on_paths",
    "mogen_betweenness",
    "mogen_closeness",
    "mogen_end_probability",
    "mogen_continuation_probability",
    "mogen_reach",
    "network_betweenness_vector",
    "network_closeness",
]
