"""Node and multi-order state identifiers.

A state is a tuple of one or more node identifiers.  On the wire states are
serialized by joining their members with ``|``; paths join nodes with ``,``.
Both characters are therefore reserved and never part of a node identifier.
"""
from __future__ import annotations

from typing import Iterable, Sequence, Tuple

PATH_SEPARATOR = ","
STATE_SEPARATOR = "|"
RESERVED = (PATH_SEPARATOR, STATE_SEPARATOR)

State = Tuple[str, ...]


def state_key(nodes: Sequence[str]) -> str:
    """Serialize a state tuple, e.g. ``("A", "C") -> "A|C"``."""
    return STATE_SEPARATOR.join(nodes)


def parse_state(key: str) -> State:
    """Inverse of :func:`state_key`."""
    return tuple(key.split(STATE_SEPARATOR))


def suffix(state: State, h: int) -> State:
    """Return the last ``min(len(state), h)`` nodes of ``state``."""
    return state[-h:] if h < len(state) else state


def invalid_node_reason(node: str) -> str | None:
    """Return why ``node`` is not a valid identifier, or ``None``."""
    if not node:
        return "empty node identifier"
    for char in RESERVED:
        if char in node:
            return f"node identifier {node!r} contains reserved character {char!r}"
    return None


def window_states(nodes: Sequence[str], h: int) -> Tuple[State, ...]:
    """Return the order-``h`` states visited along ``nodes``.

    States grow from order 1 to ``h`` and then slide with width ``h``:
    ``A,C,D,E`` with ``h=2`` gives ``A, A|C, C|D, D|E``.
    """
    nodes = tuple(nodes)
    return tuple(nodes[max(0, i + 1 - h) : i + 1] for i in range(len(nodes)))


__all__ = [
    "PATH_SEPARATOR",
    "STATE_SEPARATOR",
    "State",
    "state_key",
    "parse_state",
    "suffix",
    "invalid_node_reason",
    "window_states",
]
