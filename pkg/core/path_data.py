"""Path corpora: parsing, serialization, splitting and order-h windowing."""
from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, TextIO, Tuple

import numpy as np

from pathrank_logging.errors import ConfigError, InputError, PathParseError, SplitError
from pathrank_logging.logger import log_step

from .states import (
    PATH_SEPARATOR,
    invalid_node_reason,
    state_key,
    window_states,
)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, slots=True)
class Path:
    """An ordered node sequence observed ``frequency`` times."""

    nodes: Tuple[str, ...]
    frequency: int = 1

    def __post_init__(self) -> None:
        if not self.nodes:
            raise InputError("a path needs at least one node")
        if int(self.frequency) != self.frequency or self.frequency < 1:
            raise InputError(f"path frequency must be a positive integer, got {self.frequency!r}")
        for node in self.nodes:
            if not node or PATH_SEPARATOR in node:
                raise InputError(f"invalid node identifier {node!r}")

    @property
    def length(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, slots=True)
class DatasetStatistics:
    total: int
    unique: int
    mean_length: float
    median_length: float
    nodes: int
    links: int

    def as_dict(self) -> Dict[str, float]:
        return {
            "total_paths": self.total,
            "unique_paths": self.unique,
            "mean_length": self.mean_length,
            "median_length": self.median_length,
            "nodes": self.nodes,
            "links": self.links,
        }


class PathDataset:
    """Multiset of paths kept in canonical (sorted) order.

    Identical node sequences are merged by summing frequencies.  ``order`` is
    1 for node paths and ``h`` for datasets produced by
    :func:`window_sequences`, whose "nodes" are serialized order-``h`` states.
    """

    __slots__ = ("_paths", "_counts", "_order")

    def __init__(self, counts: Mapping[Tuple[str, ...], int] | None = None, *, order: int = 1) -> None:
        merged: Dict[Tuple[str, ...], int] = {}
        for nodes, frequency in (counts or {}).items():
            nodes = tuple(nodes)
            merged[nodes] = merged.get(nodes, 0) + int(frequency)
        self._paths: Tuple[Path, ...] = tuple(
            Path(nodes, frequency) for nodes, frequency in sorted(merged.items())
        )
        self._counts = MappingProxyType({p.nodes: p.frequency for p in self._paths})
        self._order = order

    @classmethod
    def from_paths(cls, paths: Iterable[Path | Iterable[str]], *, order: int = 1) -> "PathDataset":
        counts: Counter[Tuple[str, ...]] = Counter()
        for item in paths:
            if isinstance(item, Path):
                counts[item.nodes] += item.frequency
            else:
                counts[tuple(item)] += 1
        return cls(counts, order=order)

    @property
    def paths(self) -> Tuple[Path, ...]:
        return self._paths

    @property
    def counts(self) -> Mapping[Tuple[str, ...], int]:
        return self._counts

    @property
    def order(self) -> int:
        return self._order

    @property
    def total(self) -> int:
        """``N``: number of path observations counting multiplicity."""
        return sum(p.frequency for p in self._paths)

    @property
    def unique(self) -> int:
        return len(self._paths)

    @property
    def node_universe(self) -> frozenset[str]:
        return frozenset(node for p in self._paths for node in p.nodes)

    @property
    def max_length(self) -> int:
        return max((p.length for p in self._paths), default=0)

    def is_empty(self) -> bool:
        return not self._paths

    def __iter__(self) -> Iterator[Path]:
        return iter(self._paths)

    def __len__(self) -> int:
        return len(self._paths)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PathDataset):
            return NotImplemented
        return self._order == other._order and self._paths == other._paths

    def __hash__(self) -> int:
        return hash((self._order, self._paths))

    def __repr__(self) -> str:
        return f"PathDataset(unique={self.unique}, total={self.total}, order={self._order})"

    def to_text(self) -> str:
        """Serialize in canonical order: ``v1,v2,...`` plus ``\\t<freq>`` when above 1."""
        lines = []
        for path in self._paths:
            line = PATH_SEPARATOR.join(path.nodes)
            if path.frequency > 1:
                line = f"{line}\t{path.frequency}"
            lines.append(line)
        return "\n".join(lines) + ("\n" if lines else "")

    def statistics(self) -> DatasetStatistics:
        """Total/unique path counts, nodes per path and induced topology size."""
        total = self.total
        if not total:
            return DatasetStatistics(0, 0, 0.0, 0.0, 0, 0)
        lengths = np.array([p.length for p in self._paths], dtype=float)
        weights = np.array([p.frequency for p in self._paths], dtype=float)
        mean = float(np.average(lengths, weights=weights))
        median = _weighted_median(lengths, weights)
        links = {
            (a, b) for p in self._paths for a, b in zip(p.nodes, p.nodes[1:])
        }
        return DatasetStatistics(
            total=total,
            unique=self.unique,
            mean_length=mean,
            median_length=median,
            nodes=len(self.node_universe),
            links=len(links),
        )


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    cumulative = np.cumsum(weights)
    total = cumulative[-1]
    lower = values[np.searchsorted(cumulative, total / 2.0)]
    if total % 2:
        return float(lower)
    upper = values[np.searchsorted(cumulative, total / 2.0 + 1)]
    return float((lower + upper) / 2.0)


def parse_path_file(source: str | TextIO | Iterable[str]) -> PathDataset:
    """Parse ``v1,v2,...,vl[\\t<freq>]`` lines into a :class:`PathDataset`.

    Blank lines are skipped; identical sequences are merged.
    """

    lines: Iterable[str]
    if isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source

    counts: Counter[Tuple[str, ...]] = Counter()
    for number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) > 2:
            raise PathParseError(number, "expected at most one tab-separated frequency field")
        frequency = 1
        if len(fields) == 2:
            text = fields[1].strip()
            try:
                frequency = int(text)
            except ValueError:
                raise PathParseError(number, f"frequency {text!r} is not an integer") from None
            if frequency < 1:
                raise PathParseError(number, f"frequency must be at least 1, got {frequency}")
        nodes = tuple(fields[0].split(PATH_SEPARATOR))
        for node in nodes:
            reason = invalid_node_reason(node)
            if reason:
                raise PathParseError(number, reason)
        counts[nodes] += frequency

    dataset = PathDataset(counts)
    log_step("path_data", "paths_parsed", {"unique": dataset.unique, "total": dataset.total})
    return dataset


@dataclass(frozen=True, slots=True)
class SplitSpec:
    train_fraction: float
    seed: int
    repetition_index: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"train_fraction must lie strictly between 0 and 1, got {self.train_fraction}"
            )
        if self.repetition_index < 0:
            raise ConfigError("repetition_index must be non-negative")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng([int(self.seed) & _SEED_MASK, int(self.repetition_index)])


def split(ds: PathDataset, spec: SplitSpec) -> Tuple[PathDataset, PathDataset]:
    """Assign every path observation to train with probability ``train_fraction``.

    Observations of the same sequence are exchangeable, so the number sent to
    train is drawn as ``Binomial(frequency, train_fraction)`` per unique path,
    visiting paths in canonical order.
    """

    if ds.total < 2:
        raise SplitError(f"cannot split {ds.total} path observation(s); need at least 2")

    rng = spec.generator()
    train: Dict[Tuple[str, ...], int] = {}
    test: Dict[Tuple[str, ...], int] = {}
    for path in ds:
        kept = int(rng.binomial(path.frequency, spec.train_fraction))
        if kept:
            train[path.nodes] = kept
        if path.frequency - kept:
            test[path.nodes] = path.frequency - kept

    if not train or not test:
        raise SplitError(
            f"repetition {spec.repetition_index}: split left the "
            f"{'training' if not train else 'test'} set empty"
        )
    return PathDataset(train, order=ds.order), PathDataset(test, order=ds.order)


def subsample(ds: PathDataset, size: int, seed: int) -> PathDataset:
    """Draw ``size`` observations without replacement (all of ``ds`` if it is smaller)."""

    if size < 1:
        raise ConfigError("subsample size must be at least 1")
    if size >= ds.total:
        return ds
    rng = np.random.default_rng([int(seed) & _SEED_MASK, 0x5AB])
    frequencies = np.array([p.frequency for p in ds], dtype=np.int64)
    drawn = rng.multivariate_hypergeometric(frequencies, size)
    return PathDataset(
        {p.nodes: int(k) for p, k in zip(ds, drawn) if k}, order=ds.order
    )


def window_sequences(ds: PathDataset, h: int) -> PathDataset:
    """Rewrite every path as the sequence of its serialized order-``h`` states."""

    if h < 1:
        raise ConfigError(f"order h must be at least 1, got {h}")
    if ds.order != 1:
        raise InputError("window_sequences expects a first-order dataset")
    if h == 1:
        return ds
    counts: Dict[Tuple[str, ...], int] = {}
    for path in ds:
        windowed = tuple(state_key(s) for s in window_states(path.nodes, h))
        counts[windowed] = counts.get(windowed, 0) + path.frequency
    return PathDataset(counts, order=h)


__all__ = [
    "Path",
    "PathDataset",
    "DatasetStatistics",
    "SplitSpec",
    "parse_path_file",
    "split",
    "subsample",
    "window_sequences",
]
