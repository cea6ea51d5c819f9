"""Temporal networks and time-respecting path extraction."""
from __future__ import annotations

import bisect
import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

from pathrank_logging.errors import ConfigError, PathParseError, ResourceLimitError
from pathrank_logging.logger import log_step

from .path_data import PathDataset
from .states import invalid_node_reason

TEMPORAL_HEADER = ("source", "target", "timestamp")

TimedEdge = Tuple[str, str, int]


@dataclass(frozen=True, slots=True)
class TemporalNetwork:
    """Time-stamped directed edges; duplicates are separate interactions."""

    edges: Tuple[TimedEdge, ...]

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[str, str, int]]) -> "TemporalNetwork":
        return cls(tuple((str(s), str(t), int(ts)) for s, t, ts in edges))

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(n for s, t, _ in self.edges for n in (s, t))

    def __len__(self) -> int:
        return len(self.edges)


def read_temporal_network(source: str | TextIO) -> TemporalNetwork:
    """Read the ``source,target,timestamp`` CSV contract."""

    handle = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(handle)
    header = next(reader, None)
    if header is None or not any(cell.strip() for cell in header):
        raise PathParseError(1, "empty temporal edge file")
    if tuple(cell.strip().lower() for cell in header) != TEMPORAL_HEADER:
        raise PathParseError(1, f"expected header {','.join(TEMPORAL_HEADER)}, got {','.join(header)}")

    edges: List[TimedEdge] = []
    for row in reader:
        number = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise PathParseError(number, f"expected 3 fields, got {len(row)}")
        source_node, target_node, stamp = (cell.strip() for cell in row)
        for node in (source_node, target_node):
            reason = invalid_node_reason(node)
            if reason:
                raise PathParseError(number, reason)
        try:
            timestamp = int(stamp)
        except ValueError:
            raise PathParseError(number, f"timestamp {stamp!r} is not an integer") from None
        edges.append((source_node, target_node, timestamp))

    if not edges:
        raise PathParseError(2, "temporal edge file contains no edges")
    return TemporalNetwork(tuple(edges))


def _causal_successors(edges: List[TimedEdge], delta: int) -> List[List[int]]:
    """For every edge ``(v1,v2;t1)`` list edges ``(v2,v3;t2)`` with ``t1 < t2 <= t1 + delta``."""

    by_source: Dict[str, List[Tuple[int, int]]] = defaultdict(list)
    for index, (src, _, ts) in enumerate(edges):
        by_source[src].append((ts, index))
    for bucket in by_source.values():
        bucket.sort()

    successors: List[List[int]] = []
    for _, dst, ts in edges:
        bucket = by_source.get(dst, [])
        lo = bisect.bisect_right(bucket, (ts, len(edges)))
        hi = bisect.bisect_right(bucket, (ts + delta, len(edges)))
        successors.append([index for _, index in bucket[lo:hi]])
    return successors


def extract_paths(
    net: TemporalNetwork,
    delta: int,
    max_paths: Optional[int] = None,
) -> PathDataset:
    """Return every maximal time-respecting path of ``net``.

    Edges form a causal DAG in which ``(v1,v2;t1)`` precedes ``(v2,v3;t2)``
    iff ``t1 < t2`` and ``t2 - t1 <= delta``.  Each root-to-sink path of the
    DAG becomes one node path.  The number of maximal paths is counted before
    enumeration; exceeding ``max_paths`` raises :class:`ResourceLimitError`.
    """

    if delta < 0:
        raise ConfigError(f"delta must be non-negative, got {delta}")
    if max_paths is not None and max_paths < 1:
        raise ConfigError("max_paths must be a positive integer")

    # Canonical order makes the result independent of input order.
    edges = sorted(net.edges, key=lambda e: (e[2], e[0], e[1]))
    successors = _causal_successors(edges, delta)
    has_predecessor = [False] * len(edges)
    for succ in successors:
        for index in succ:
            has_predecessor[index] = True

    # Paths to a sink from every edge, in decreasing time order (a topological order).
    counts = [0] * len(edges)
    for index in sorted(range(len(edges)), key=lambda i: edges[i][2], reverse=True):
        succ = successors[index]
        counts[index] = sum(counts[j] for j in succ) if succ else 1
    roots = [i for i in range(len(edges)) if not has_predecessor[i]]
    required = sum(counts[i] for i in roots)
    if max_paths is not None and required > max_paths:
        raise ResourceLimitError(
            f"temporal network yields {required} maximal paths, above the limit of {max_paths}",
            limit=max_paths,
            required=required,
        )

    found: Dict[Tuple[str, ...], int] = defaultdict(int)
    for root in roots:
        stack: List[Tuple[int, Tuple[str, ...]]] = [(root, (edges[root][0], edges[root][1]))]
        while stack:
            index, nodes = stack.pop()
            succ = successors[index]
            if not succ:
                found[nodes] += 1
                continue
            for nxt in succ:
                stack.append((nxt, nodes + (edges[nxt][1],)))

    dataset = PathDataset(found)
    log_step(
        "temporal",
        "paths_extracted",
        {"edges": len(edges), "delta": delta, "total": dataset.total, "unique": dataset.unique},
    )
    return dataset


__all__ = ["TemporalNetwork", "TEMPORAL_HEADER", "read_temporal_network", "extract_paths"]
