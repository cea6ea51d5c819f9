"""MOGen: multi-order generative model of paths as an absorbing Markov chain.

A path ``v1 -> ... -> vl`` is encoded as ``* -> (v1) -> (v1,v2) -> ... ->
(v_{l-K+1},...,v_l) -> †``: states grow to order ``K`` and then slide.  The
fitted transition structure splits into the start distribution ``S`` (from
``*``), the transient block ``Q`` between states and the absorbing column ``R``
(into ``†``).  The fundamental matrix ``F = (I - Q)^-1`` yields expected
visits, which every MOGen centrality is computed from.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg

from config.settings import SETTINGS
from pathrank_logging.errors import (
    ConfigError,
    InputError,
    NumericalError,
    ResourceLimitError,
    SingularModelError,
)
from pathrank_logging.logger import log_step

from .network_model import DistanceMatrix, all_pairs_distances
from .path_data import PathDataset
from .states import State, parse_state, state_key, window_states

ROW_TOLERANCE = 1e-12
_SEED_MASK = (1 << 64) - 1
# Rows of F checked against F (I - Q) = I after a sparse LU solve.
RESIDUAL_CHECK_ROWS = 8


def _state_order(state: State) -> Tuple[int, State]:
    return (len(state), state)


@dataclass(frozen=True, slots=True)
class TransitionCounts:
    """Raw multiplicity-weighted counts behind ``S``, ``Q`` and ``R``."""

    start: Mapping[State, int]
    transitions: Mapping[State, Mapping[State, int]]
    end: Mapping[State, int]


@dataclass(frozen=True, eq=False)
class MogenModel:
    """A fitted MOGen model of maximum order ``K`` over observed states only."""

    K: int
    states: Tuple[State, ...]
    S: np.ndarray = field(repr=False)
    Q: scipy.sparse.csr_matrix = field(repr=False)
    R: np.ndarray = field(repr=False)
    counts: Optional[TransitionCounts] = field(default=None, repr=False)

    @cached_property
    def keys(self) -> Tuple[str, ...]:
        return tuple(state_key(s) for s in self.states)

    @cached_property
    def index(self) -> Dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def n(self) -> int:
        return len(self.states)

    def orders(self) -> np.ndarray:
        return np.array([len(s) for s in self.states], dtype=int)

    @classmethod
    def from_probabilities(
        cls,
        K: int,
        S: Mapping[str, float],
        Q: Mapping[str, Mapping[str, float]],
        R: Mapping[str, float],
        counts: Optional[TransitionCounts] = None,
    ) -> "MogenModel":
        """Build a model from serialized-state probability tables and validate it."""

        if K < 1:
            raise ConfigError(f"maximum order K must be at least 1, got {K}")
        names = set(S) | set(R) | set(Q)
        for row in Q.values():
            names.update(row)
        states = tuple(sorted((parse_state(k) for k in names), key=_state_order))
        index = {s: i for i, s in enumerate(states)}
        start = np.zeros(len(states))
        for key, p in S.items():
            start[index[parse_state(key)]] = float(p)
        absorb = np.zeros(len(states))
        for key, p in R.items():
            absorb[index[parse_state(key)]] = float(p)
        rows, cols, data = [], [], []
        for src, row in Q.items():
            for dst, p in row.items():
                if p:
                    rows.append(index[parse_state(src)])
                    cols.append(index[parse_state(dst)])
                    data.append(float(p))
        transient = scipy.sparse.csr_matrix(
            (data, (rows, cols)), shape=(len(states), len(states))
        )
        model = cls(K=K, states=states, S=start, Q=transient, R=absorb, counts=counts)
        check_model(model)
        return model


def check_model(model: MogenModel) -> None:
    """Assert row-stochasticity, the start distribution and the multi-order block structure."""

    row_sums = np.asarray(model.Q.sum(axis=1)).ravel() + model.R
    bad = np.flatnonzero(np.abs(row_sums - 1.0) > ROW_TOLERANCE)
    if bad.size:
        raise InputError(
            "rows of [Q | R] must sum to 1; violated at "
            + ", ".join(model.keys[i] for i in bad[:5])
        )
    if (model.S < 0).any() or abs(model.S.sum() - 1.0) > ROW_TOLERANCE:
        raise InputError("start distribution must be non-negative and sum to 1")
    if model.Q.nnz and model.Q.data.min() < 0 or (model.R < 0).any():
        raise InputError("transition probabilities must be non-negative")
    for i in np.flatnonzero(model.S):
        if len(model.states[i]) != 1:
            raise InputError(f"start state {model.keys[i]} is not of order 1")

    coo = model.Q.tocoo()
    for i, j in zip(coo.row, coo.col):
        src, dst = model.states[i], model.states[j]
        if len(src) < model.K:
            valid = len(dst) == len(src) + 1 and dst[:-1] == src
        else:
            valid = len(dst) == model.K and dst[:-1] == src[1:]
        if not valid:
            raise InputError(
                f"transition {model.keys[i]} -> {model.keys[j]} breaks the order-{model.K} block structure"
            )


def fit(train: PathDataset, K: int) -> MogenModel:
    """Fit a MOGen model of maximum order ``K`` by counting encoded transitions."""

    if K < 1:
        raise ConfigError(f"maximum order K must be at least 1, got {K}")
    if train.is_empty():
        raise InputError("cannot fit a model on an empty dataset")
    if train.order != 1:
        raise InputError("MOGen models are fitted on first-order paths")

    start: Counter[State] = Counter()
    end: Counter[State] = Counter()
    transitions: Dict[State, Counter[State]] = defaultdict(Counter)
    for path in train:
        encoded = window_states(path.nodes, K)
        start[encoded[0]] += path.frequency
        for src, dst in zip(encoded, encoded[1:]):
            transitions[src][dst] += path.frequency
        end[encoded[-1]] += path.frequency

    observed = set(start) | set(end) | set(transitions)
    for row in transitions.values():
        observed.update(row)
    states = tuple(sorted(observed, key=_state_order))
    index = {s: i for i, s in enumerate(states)}

    totals = np.zeros(len(states))
    for s, c in end.items():
        totals[index[s]] += c
    rows, cols, data = [], [], []
    for src, row in transitions.items():
        for dst, c in row.items():
            totals[index[src]] += c
            rows.append(index[src])
            cols.append(index[dst])
            data.append(float(c))

    transient = scipy.sparse.csr_matrix(
        (np.array(data) / totals[rows] if data else [], (rows, cols)),
        shape=(len(states), len(states)),
    )
    absorb = np.zeros(len(states))
    for s, c in end.items():
        absorb[index[s]] = c / totals[index[s]]
    begin = np.zeros(len(states))
    for s, c in start.items():
        begin[index[s]] = c / train.total

    counts = TransitionCounts(
        start=dict(start),
        transitions={src: dict(row) for src, row in transitions.items()},
        end=dict(end),
    )
    model = MogenModel(K=K, states=states, S=begin, Q=transient, R=absorb, counts=counts)
    check_model(model)
    log_step("mogen", "model_fitted", {"K": K, "states": model.n, "transitions": int(transient.nnz)})
    return model


def unabsorbable_states(model: MogenModel) -> Tuple[str, ...]:
    """States from which ``†`` cannot be reached; ``I - Q`` is singular iff this is non-empty."""

    n = model.n
    if n == 0:
        return ()
    coo = model.Q.tocoo()
    absorbing = np.flatnonzero(model.R > 0)
    # Reverse graph plus a virtual terminal node n fed by every absorbing state.
    rows = np.concatenate([coo.col, np.full(absorbing.size, n)])
    cols = np.concatenate([coo.row, absorbing])
    reverse = scipy.sparse.csr_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(n + 1, n + 1)
    )
    reached = scipy.sparse.csgraph.breadth_first_order(
        reverse, n, directed=True, return_predecessors=False
    )
    absorbed = np.zeros(n + 1, dtype=bool)
    absorbed[reached] = True
    return tuple(model.keys[i] for i in np.flatnonzero(~absorbed[:n]))


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    """``F = (I - Q)^-1``, held densely or as a sparse LU factorization of ``I - Q``."""

    states: Tuple[str, ...]
    method: str
    residual: float
    dense: Optional[np.ndarray] = field(default=None, repr=False)
    lu: Any = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.states)

    def to_dense(self) -> np.ndarray:
        if self.dense is not None:
            return self.dense
        return self.lu.solve(np.eye(self.n))

    def left_multiply(self, vector: np.ndarray) -> np.ndarray:
        """Return ``vector · F``."""
        if self.dense is not None:
            return vector @ self.dense
        return self.lu.solve(np.asarray(vector, dtype=float), trans="T")

    def row_sums(self) -> np.ndarray:
        """Return ``F · 1``: expected remaining visits from every state, itself included."""
        if self.dense is not None:
            return self.dense.sum(axis=1)
        return self.lu.solve(np.ones(self.n))


def fundamental_matrix(
    model: MogenModel,
    *,
    dense_limit: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> FundamentalMatrix:
    """Solve ``(I - Q) F = I``; dense below ``dense_limit`` states, sparse LU above."""

    dense_limit = SETTINGS.dense_solve_limit if dense_limit is None else dense_limit
    tolerance = SETTINGS.residual_tolerance if tolerance is None else tolerance

    offending = unabsorbable_states(model)
    if offending:
        raise SingularModelError(offending)

    n = model.n
    system = (scipy.sparse.identity(n, format="csc") - model.Q.tocsc()).tocsc()
    if n < dense_limit:
        matrix = system.toarray()
        try:
            F = scipy.linalg.solve(matrix, np.eye(n))
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError(f"dense solve of I - Q failed: {exc}") from exc
        residual = float(np.abs(F @ matrix - np.eye(n)).max()) if n else 0.0
        result = FundamentalMatrix(model.keys, "dense", residual, dense=F)
    else:
        try:
            lu = scipy.sparse.linalg.splu(system)
        except RuntimeError as exc:
            raise NumericalError(f"sparse LU of I - Q failed: {exc}") from exc
        ones = np.ones(n)
        residual = float(np.abs(system @ lu.solve(ones) - ones).max())
        rows = np.linspace(0, n - 1, num=min(n, RESIDUAL_CHECK_ROWS)).astype(int)
        basis = np.zeros((n, rows.size))
        basis[rows, np.arange(rows.size)] = 1.0
        # each column of the solve is a row of F; F (I - Q) = I holds row by row
        f_rows = lu.solve(basis, trans="T")
        residual = max(residual, float(np.abs(system.T @ f_rows - basis).max()))
        result = FundamentalMatrix(model.keys, "sparse_lu", residual, lu=lu)

    if not residual <= tolerance:
        raise NumericalError(
            f"fundamental matrix residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
        )
    log_step(
        "mogen",
        "fundamental_matrix_solved",
        {"K": model.K, "states": n, "method": result.method, "residual": residual},
    )
    return result


def expected_visits(model: MogenModel, F: FundamentalMatrix) -> Dict[str, float]:
    """``S · F``: expected visits per path to every state."""
    visits = F.left_multiply(model.S)
    return {key: float(v) for key, v in zip(model.keys, visits)}


# ---------------------------------------------------------------------------
# Sampling and enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Sampler:
    start_states: np.ndarray
    start_cumulative: np.ndarray
    targets: List[np.ndarray]
    cumulative: List[np.ndarray]

    @classmethod
    def for_model(cls, model: MogenModel) -> "_Sampler":
        starts = np.flatnonzero(model.S)
        targets, cumulative = [], []
        for i in range(model.n):
            lo, hi = model.Q.indptr[i], model.Q.indptr[i + 1]
            # -1 stands for the terminal state.
            targets.append(np.append(model.Q.indices[lo:hi], -1))
            cumulative.append(np.cumsum(np.append(model.Q.data[lo:hi], model.R[i])))
        return cls(starts, np.cumsum(model.S[starts]), targets, cumulative)

    @staticmethod
    def _pick(cumulative: np.ndarray, u: float) -> int:
        position = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
        return min(position, cumulative.size - 1)

    def walk(self, rng: np.random.Generator) -> List[int]:
        state = int(self.start_states[self._pick(self.start_cumulative, rng.random())])
        visited = [state]
        while True:
            nxt = int(self.targets[state][self._pick(self.cumulative[state], rng.random())])
            if nxt < 0:
                return visited
            visited.append(nxt)
            state = nxt


def sample_walks(
    model: MogenModel,
    count: int,
    seed: int,
    *,
    workers: int = 1,
    block_size: Optional[int] = None,
) -> Counter[Tuple[str, ...]]:
    """Draw ``count`` walks ``* -> ... -> †`` and count the visited state sequences.

    Walks are drawn in blocks of ``block_size``; block ``b`` uses a generator
    seeded with ``(seed, b)``, so the result does not depend on ``workers``.
    """

    if count < 1:
        raise ConfigError("sample count must be at least 1")
    offending = unabsorbable_states(model)
    if offending:
        raise SingularModelError(offending)

    block_size = block_size or SETTINGS.sample_block_size
    sampler = _Sampler.for_model(model)
    blocks = [
        (b, min(block_size, count - b * block_size))
        for b in range((count + block_size - 1) // block_size)
    ]

    def run_block(block: Tuple[int, int]) -> Counter[Tuple[int, ...]]:
        index, size = block
        rng = np.random.default_rng([int(seed) & _SEED_MASK, index])
        return Counter(tuple(sampler.walk(rng)) for _ in range(size))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run_block, blocks))

    merged: Counter[Tuple[str, ...]] = Counter()
    for result in results:
        for walk, c in result.items():
            merged[tuple(model.keys[i] for i in walk)] += c
    return merged


def sample_paths(
    model: MogenModel,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> PathDataset:
    """Sample ``count`` paths; each path is the last node of every visited state."""

    walks = sample_walks(model, count, seed, workers=workers)
    counts: Dict[Tuple[str, ...], int] = defaultdict(int)
    for walk, c in walks.items():
        counts[tuple(parse_state(key)[-1] for key in walk)] += c
    return PathDataset(counts)


def enumerate_paths(model: MogenModel, max_paths: int = 100_000) -> Dict[Tuple[str, ...], float]:
    """List every positive-probability path with its probability.

    Raises :class:`ResourceLimitError` for models whose walks can revisit a
    state (infinitely many paths) or that have more than ``max_paths`` paths.
    """

    sampler = _Sampler.for_model(model)
    result: Dict[Tuple[str, ...], float] = defaultdict(float)
    stack: List[Tuple[int, float, Tuple[int, ...]]] = [
        (int(s), float(model.S[s]), (int(s),)) for s in sampler.start_states
    ]
    while stack:
        state, probability, walk = stack.pop()
        if model.R[state] > 0:
            nodes = tuple(model.states[i][-1] for i in walk)
            if nodes not in result and len(result) >= max_paths:
                raise ResourceLimitError(
                    f"model has more than {max_paths} paths", limit=max_paths
                )
            result[nodes] += probability * float(model.R[state])
        lo, hi = model.Q.indptr[state], model.Q.indptr[state + 1]
        for nxt, p in zip(model.Q.indices[lo:hi], model.Q.data[lo:hi]):
            if nxt in walk:
                raise ResourceLimitError(
                    "model contains a cycle through "
                    f"{model.keys[int(nxt)]}; its paths cannot be enumerated"
                )
            stack.append((int(nxt), probability * float(p), walk + (int(nxt),)))
    return dict(result)


@all_pairs_distances.register
def _(model: MogenModel) -> DistanceMatrix:
    # Hop distances over the transient topology (edges where Q > 0).
    adjacency = model.Q.copy()
    adjacency.data = np.ones_like(adjacency.data)
    values = scipy.sparse.csgraph.shortest_path(adjacency, directed=True, unweighted=True)
    return DistanceMatrix(model.keys, np.asarray(values, dtype=float))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def model_to_dict(model: MogenModel) -> Dict[str, Any]:
    """JSON-ready representation; floats keep their shortest round-trip repr."""

    coo = model.Q.tocoo()
    transient: Dict[str, Dict[str, float]] = defaultdict(dict)
    for i, j, p in zip(coo.row, coo.col, coo.data):
        transient[model.keys[i]][model.keys[j]] = float(p)
    payload: Dict[str, Any] = {
        "K": model.K,
        "states": list(model.keys),
        "S": {model.keys[i]: float(model.S[i]) for i in np.flatnonzero(model.S)},
        "Q": {src: dict(sorted(row.items())) for src, row in sorted(transient.items())},
        "R": {model.keys[i]: float(model.R[i]) for i in np.flatnonzero(model.R)},
    }
    if model.counts is not None:
        payload["counts"] = {
            "start": {state_key(s): c for s, c in sorted(model.counts.start.items())},
            "transitions": {
                state_key(src): {state_key(dst): c for dst, c in sorted(row.items())}
                for src, row in sorted(model.counts.transitions.items())
            },
            "end": {state_key(s): c for s, c in sorted(model.counts.end.items())},
        }
    return payload


def model_from_dict(payload: Mapping[str, Any]) -> MogenModel:
    """Inverse of :func:`model_to_dict`; probabilities are taken verbatim."""

    counts = None
    raw = payload.get("counts")
    if raw:
        counts = TransitionCounts(
            start={parse_state(k): int(c) for k, c in raw.get("start", {}).items()},
            transitions={
                parse_state(src): {parse_state(dst): int(c) for dst, c in row.items()}
                for src, row in raw.get("transitions", {}).items()
            },
            end={parse_state(k): int(c) for k, c in raw.get("end", {}).items()},
        )
    model = MogenModel.from_probabilities(
        int(payload["K"]), payload["S"], payload["Q"], payload["R"], counts=counts
    )
    declared = set(payload.get("states", model.keys))
    if declared != set(model.keys):
        raise InputError("declared states do not match the transition tables")
    return model


__all__ = [
    "MogenModel",
    "TransitionCounts",
    "FundamentalMatrix",
    "fit",
    "check_model",
    "fundamental_matrix",
    "expected_visits",
    "unabsorbable_states",
    "sample_walks",
    "sample_paths",
    "enumerate_paths",
    "model_to_dict",
    "model_from_dict",
]
