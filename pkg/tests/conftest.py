import numpy as np
import pytest

from graphcheb import WeightedGraph, build_geometric_graph, is_connected


def connected_graph(n, seed, density=0.9):
    """Small connected geometric graph; retries over consecutive seeds."""
    for s in range(seed, seed + 200):
        g = build_geometric_graph(n, density / np.sqrt(n), 0.3, seed=s)
        if is_connected(g):
            return g
    raise RuntimeError("no connected graph found")


def path_graph(n, w=1.0):
    return WeightedGraph(n, np.array([[i, i + 1, w] for i in range(n - 1)]))


def two_node():
    return WeightedGraph(2, np.array([[0, 1, 1.0]]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def graph30():
    return connected_graph(30, 7)
