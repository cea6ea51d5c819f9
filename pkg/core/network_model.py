"""First-order network model, shortest-path distances and network centralities."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, singledispatch
from typing import Dict, Iterable, Literal, Optional, Tuple

import networkx as nx
import numpy as np

from pathrank_logging.errors import InputError
from pathrank_logging.logger import log_step

from .path_data import PathDataset
from .states import parse_state, state_key, suffix

Direction = Literal["out", "in"]


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """Directed graph of all consecutive node pairs on training paths.

    Edges carry a multiplicity-weighted ``count`` attribute; distances ignore it.
    """

    graph: nx.DiGraph = field(repr=False)

    @property
    def nodes(self) -> Tuple[str, ...]:
        return tuple(sorted(self.graph.nodes))

    @property
    def edges(self) -> Dict[Tuple[str, str], int]:
        return {(u, v): int(data["count"]) for u, v, data in self.graph.edges(data=True)}

    def __repr__(self) -> str:
        return f"NetworkModel(nodes={self.graph.number_of_nodes()}, edges={self.graph.number_of_edges()})"


def build_network(train: PathDataset) -> NetworkModel:
    """Build the network model of ``train`` (nodes on paths, consecutive pairs as edges)."""

    if train.is_empty():
        raise InputError("cannot build a network from an empty dataset")
    graph = nx.DiGraph()
    for path in train:
        graph.add_nodes_from(path.nodes)
        for u, v in zip(path.nodes, path.nodes[1:]):
            if graph.has_edge(u, v):
                graph[u][v]["count"] += path.frequency
            else:
                graph.add_edge(u, v, count=path.frequency)
    log_step(
        "network",
        "network_built",
        {"nodes": graph.number_of_nodes(), "edges": graph.number_of_edges()},
    )
    return NetworkModel(graph)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Hop distances between states; ``inf`` marks unreachable pairs."""

    states: Tuple[str, ...]
    values: np.ndarray = field(repr=False)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    def distance(self, source: str, target: str) -> Optional[int]:
        """Return ``d(source, target)`` or ``None`` when unreachable."""
        value = self.values[self.index[source], self.index[target]]
        return int(value) if np.isfinite(value) else None

    def as_dict(self) -> Dict[Tuple[str, str], int]:
        rows, cols = np.nonzero(np.isfinite(self.values))
        return {
            (self.states[r], self.states[c]): int(self.values[r, c])
            for r, c in zip(rows, cols)
        }


def _empty_distances(states: Iterable[str]) -> Tuple[Tuple[str, ...], Dict[str, int], np.ndarray]:
    ordered = tuple(sorted(states))
    values = np.full((len(ordered), len(ordered)), np.inf)
    np.fill_diagonal(values, 0.0)
    return ordered, {s: i for i, s in enumerate(ordered)}, values


@singledispatch
def all_pairs_distances(model: object) -> DistanceMatrix:
    """Unweighted shortest-hop distances for a network, MOGen model or path dataset."""
    raise TypeError(f"no distance definition for {type(model).__name__}")


@all_pairs_distances.register
def _(model: NetworkModel) -> DistanceMatrix:
    ordered, index, values = _empty_distances(model.graph.nodes)
    for source, lengths in nx.all_pairs_shortest_path_length(model.graph):
        row = index[source]
        for target, hops in lengths.items():
            values[row, index[target]] = hops
    return DistanceMatrix(ordered, values)


@all_pairs_distances.register
def _(model: PathDataset) -> DistanceMatrix:
    # d(v, w): transitions on the shortest contiguous sub-path from v to w.
    if model.is_empty():
        raise InputError("cannot compute distances on an empty dataset")
    ordered, index, values = _empty_distances(model.node_universe)
    for path in model:
        positions = np.array([index[node] for node in path.nodes])
        for hops in range(1, len(positions)):
            np.minimum.at(values, (positions[:-hops], positions[hops:]), float(hops))
    return DistanceMatrix(ordered, values)


def network_betweenness(model: NetworkModel) -> Dict[str, float]:
    """Sum over ordered pairs ``s != t`` of the share of shortest paths through each node."""

    scores = nx.betweenness_centrality(model.graph, normalized=False, endpoints=False)
    return {node: float(scores.get(node, 0.0)) for node in model.nodes}


def harmonic_closeness(
    D: DistanceMatrix,
    states: Optional[Iterable[str]] = None,
    *,
    direction: Direction = "out",
) -> Dict[str, float]:
    """``c_v = sum of 1/d(v, w)`` over reachable ``w != v``.

    ``direction="out"`` uses the row of ``v``; ``"in"`` uses its column.
    """

    values = D.values if direction == "out" else D.values.T
    reciprocal = np.divide(
        1.0,
        values,
        out=np.zeros_like(values),
        where=np.isfinite(values) & (values > 0),
    )
    totals = reciprocal.sum(axis=1)
    wanted = D.states if states is None else tuple(states)
    return {s: float(totals[D.index[s]]) if s in D.index else 0.0 for s in wanted}


def project_distances(D: DistanceMatrix, h: int = 1) -> DistanceMatrix:
    """Collapse multi-order states onto their last ``h`` nodes, keeping minimum distances.

    With ``h=1`` this is the first-order projection: ``d(a, b)`` is the
    smallest ``D(u, w)`` over states ``u`` ending in ``a`` and ``w`` ending in ``b``.
    """

    if not D.states:
        return D
    keys = [state_key(suffix(parse_state(s), h)) for s in D.states]
    targets = tuple(sorted(set(keys)))
    position = {k: i for i, k in enumerate(targets)}
    group = np.array([position[k] for k in keys])
    order = np.argsort(group, kind="stable")
    starts = np.searchsorted(group[order], np.arange(len(targets)))
    rows = np.minimum.reduceat(D.values[order], starts, axis=0)
    projected = np.minimum.reduceat(rows[:, order], starts, axis=1)
    return DistanceMatrix(targets, projected)


__all__ = [
    "NetworkModel",
    "DistanceMatrix",
    "build_network",
    "all_pairs_distances",
    "network_betweenness",
    "harmonic_closeness",
    "project_distances",
]
