"""Tests for the network model, distances and network centralities."""

import itertools

import networkx as nx
import numpy as np
import pytest

from core.network_model import (
    DistanceMatrix,
    NetworkModel,
    all_pairs_distances,
    build_network,
    harmonic_closeness,
    network_betweenness,
    project_distances,
)
from core.path_data import PathDataset, parse_path_file
from pathrank_logging.errors import InputError


def _random_graph(seed: int, max_nodes: int = 8) -> NetworkModel:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, max_nodes + 1))
    graph = nx.DiGraph()
    graph.add_nodes_from(f"n{i}" for i in range(n))
    for u, v in itertools.permutations(range(n), 2):
        if rng.random() < 0.3:
            graph.add_edge(f"n{u}", f"n{v}", count=1)
    return NetworkModel(graph)


def test_build_network_toy(toy_paths):
    net = build_network(toy_paths)
    assert net.nodes == tuple("ABCDEF")
    assert set(net.edges) == {("A", "C"), ("B", "C"), ("C", "D"), ("D", "E"), ("D", "F")}
    assert net.edges[("C", "D")] == 2


def test_build_network_self_loop_and_multiplicity():
    loop = build_network(parse_path_file("A,A"))
    assert loop.nodes == ("A",)
    assert loop.edges == {("A", "A"): 1}
    assert build_network(parse_path_file("A,C\t3")).edges == {("A", "C"): 3}
    with pytest.raises(InputError):
        build_network(PathDataset())


def test_network_distances_toy(toy_paths):
    D = all_pairs_distances(build_network(toy_paths))
    assert D.distance("A", "F") == 3
    assert D.distance("E", "A") is None
    assert all(D.distance(v, v) == 0 for v in D.states)


def test_path_distances_use_observed_sub_paths(toy_paths):
    D = all_pairs_distances(toy_paths)
    assert D.distance("A", "F") is None
    assert D.distance("A", "E") == 3
    assert D.distance("B", "D") == 2


def test_path_distances_take_the_shortest_occurrence():
    D = all_pairs_distances(parse_path_file("A,B,C,A,D\nX,A,D"))
    assert D.distance("A", "D") == 1
    assert D.distance("B", "A") == 2
    assert D.distance("A", "A") == 0


def test_path_distances_bounded_by_network(toy_paths):
    ds = parse_path_file("A,B,C\nB,C,D,E\nE,A,B\nC,D")
    net = all_pairs_distances(build_network(ds)).as_dict()
    paths = all_pairs_distances(ds).as_dict()
    for pair, hops in paths.items():
        assert net[pair] <= hops


@pytest.mark.parametrize("seed", range(6))
def test_distances_match_floyd_warshall(seed):
    model = _random_graph(seed)
    D = all_pairs_distances(model)
    oracle = nx.floyd_warshall_numpy(model.graph, nodelist=list(D.states))
    np.testing.assert_array_equal(D.values, oracle)


def test_network_betweenness_toy(toy_paths):
    scores = network_betweenness(build_network(toy_paths))
    assert scores == {"A": 0.0, "B": 0.0, "C": 6.0, "D": 6.0, "E": 0.0, "F": 0.0}


def test_network_betweenness_star():
    k = 4
    graph = nx.DiGraph()
    for i in range(k):
        graph.add_edge("hub", f"leaf{i}", count=1)
        graph.add_edge(f"leaf{i}", "hub", count=1)
    scores = network_betweenness(NetworkModel(graph))
    assert scores["hub"] == k * (k - 1)
    assert all(scores[f"leaf{i}"] == 0 for i in range(k))


def test_network_betweenness_without_interior_nodes():
    scores = network_betweenness(build_network(parse_path_file("A,B\nC,D")))
    assert set(scores.values()) == {0.0}


@pytest.mark.parametrize("seed", range(100))
def test_network_betweenness_matches_brute_force(seed):
    model = _random_graph(1000 + seed, max_nodes=5)
    expected = dict.fromkeys(model.graph.nodes, 0.0)
    for s, t in itertools.permutations(model.graph.nodes, 2):
        if not nx.has_path(model.graph, s, t):
            continue
        shortest = list(nx.all_shortest_paths(model.graph, s, t))
        for path in shortest:
            for v in path[1:-1]:
                expected[v] += 1.0 / len(shortest)
    assert network_betweenness(model) == pytest.approx(expected, abs=1e-12)


def test_harmonic_closeness_toy(toy_paths):
    D = all_pairs_distances(build_network(toy_paths))
    closeness = harmonic_closeness(D)
    assert closeness["A"] == pytest.approx(13 / 6)
    assert closeness["E"] == 0.0
    assert harmonic_closeness(D, direction="in")["F"] == pytest.approx(13 / 6)


def test_harmonic_closeness_edge_cases():
    chain = all_pairs_distances(build_network(parse_path_file("v,w\nx")))
    closeness = harmonic_closeness(chain)
    assert closeness == {"v": 1.0, "w": 0.0, "x": 0.0}
    assert harmonic_closeness(chain, ["x", "missing"]) == {"x": 0.0, "missing": 0.0}


def test_closeness_monotone_under_edge_addition():
    base = parse_path_file("A,B,C\nC,D")
    extended = parse_path_file("A,B,C\nC,D\nD,A")
    before = harmonic_closeness(all_pairs_distances(build_network(base)))
    after = harmonic_closeness(all_pairs_distances(build_network(extended)))
    assert all(after[v] >= before[v] for v in before)


def test_project_distances_takes_minimum_over_states():
    inf = np.inf
    D = DistanceMatrix(
        ("A|B", "B|B", "C|A"),
        np.array([[0, inf, 3], [inf, 0, 2], [inf, inf, 0]], dtype=float),
    )
    projected = project_distances(D)
    assert projected.states == ("A", "B")
    assert projected.distance("B", "A") == 2
    assert projected.distance("A", "B") is None
    assert projected.distance("B", "B") == 0


def test_project_distances_identity_for_first_order(toy_paths):
    D = all_pairs_distances(build_network(toy_paths))
    projected = project_distances(D)
    assert projected.states == D.states
    np.testing.assert_array_equal(projected.values, D.values)
