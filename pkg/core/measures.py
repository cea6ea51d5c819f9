"""Measure and model-kind definitions and helpers."""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pathrank_logging.errors import ConfigError


class Measure(str, Enum):
    """Enumerates the five path centrality measures."""

    BETWEENNESS = "betweenness"
    CLOSENESS = "closeness"
    END_PROBABILITY = "end_probability"
    CONTINUATION_PROBABILITY = "continuation_probability"
    REACH = "reach"


class ModelKind(str, Enum):
    """Enumerates the model classes a measure can be computed on."""

    NETWORK = "network"
    MOGEN = "mogen"
    PATH = "path"


_NETWORK_MEASURES = frozenset({Measure.BETWEENNESS, Measure.CLOSENESS})


def supports(kind: ModelKind, measure: Measure) -> bool:
    """Return ``True`` when ``measure`` is defined for ``kind``."""

    if kind is ModelKind.NETWORK:
        return measure in _NETWORK_MEASURES
    return True


_ALIASES = {
    "between": Measure.BETWEENNESS,
    "close": Measure.CLOSENESS,
    "end": Measure.END_PROBABILITY,
    "continuation": Measure.CONTINUATION_PROBABILITY,
    "continue": Measure.CONTINUATION_PROBABILITY,
    "path_reach": Measure.REACH,
}


def parse_measure(value: str | Measure) -> Measure:
    """Parse a measure name, accepting the short CLI aliases."""

    if isinstance(value, Measure):
        return value
    text = str(value).strip().lower().replace("-", "_")
    if text in _ALIASES:
        return _ALIASES[text]
    try:
        return Measure(text)
    except ValueError as exc:
        names = ", ".join(m.value for m in Measure)
        raise ConfigError(f"unknown measure {value!r}; expected one of {names}") from exc


_LABEL_PATTERN = re.compile(r"^(?:(?P<n>N)|(?P<p>P)|M(?P<k>[1-9][0-9]*))$")


@dataclass(frozen=True, order=True)
class ModelSpec:
    """A configured model: the network (``N``), a MOGen of order K (``MK``) or the path model (``P``)."""

    kind: ModelKind
    order: Optional[int] = None

    @property
    def label(self) -> str:
        if self.kind is ModelKind.NETWORK:
            return "N"
        if self.kind is ModelKind.PATH:
            return "P"
        return f"M{self.order}"

    @property
    def sort_key(self) -> tuple[int, int]:
        """Column order N, M1..MK, P."""
        if self.kind is ModelKind.NETWORK:
            return (0, 0)
        if self.kind is ModelKind.MOGEN:
            return (1, int(self.order or 0))
        return (2, 0)


def parse_model_label(value: str | ModelSpec) -> ModelSpec:
    """Parse ``N``, ``P`` or ``M<K>`` (also ``network``, ``path``, ``mogen:K``)."""

    if isinstance(value, ModelSpec):
        return value
    text = str(value).strip()
    lowered = text.lower()
    if lowered == "network":
        return ModelSpec(ModelKind.NETWORK)
    if lowered == "path":
        return ModelSpec(ModelKind.PATH)
    if lowered.startswith("mogen:"):
        text = "M" + text.split(":", 1)[1]
    match = _LABEL_PATTERN.match(text.upper())
    if not match:
        raise ConfigError(f"unknown model {value!r}; expected N, P or M<K> with K >= 1")
    if match.group("n"):
        return ModelSpec(ModelKind.NETWORK)
    if match.group("p"):
        return ModelSpec(ModelKind.PATH)
    return ModelSpec(ModelKind.MOGEN, int(match.group("k")))


__all__ = [
    "Measure",
    "ModelKind",
    "ModelSpec",
    "supports",
    "parse_measure",
    "parse_model_label",
]
