import numpy as np
import pytest

from graphcheb import (WeightedGraph, build_geometric_graph, is_connected, lambda_max_bound, laplacian,
                       load_graph, load_signal, normalized_laplacian, save_graph, save_signal, smoothness)
from graphcheb.graph import geometric_graph_from_coords

from conftest import connected_graph, path_graph, two_node


def test_coincident_nodes_get_unit_weight():
    g = geometric_graph_from_coords(np.array([[0.3, 0.3], [0.3, 0.3]]), sigma=0.1, kappa=0.5)
    assert g.edges.tolist() == [[0.0, 1.0, 1.0]]


def test_weight_threshold_matches_distance_cutoff():
    sigma, kappa = 0.074, 0.6
    cutoff = sigma * np.sqrt(2 * np.log(1 / kappa))
    assert cutoff == pytest.approx(0.0748, abs=5e-5)
    inside = geometric_graph_from_coords([[0, 0], [cutoff * (1 - 1e-9), 0]], sigma, kappa)
    outside = geometric_graph_from_coords([[0, 0], [cutoff * (1 + 1e-9), 0]], sigma, kappa)
    assert inside.edge_count == 1 and outside.edge_count == 0


def test_distance_threshold_mode():
    g = geometric_graph_from_coords([[0, 0], [0.05, 0], [0.2, 0]], 0.074, 0.1, threshold="distance")
    assert g.edge_count == 1
    assert g.edges[0, 2] == pytest.approx(np.exp(-0.05**2 / (2 * 0.074**2)))


def test_geometric_graph_against_brute_force():
    rng = np.random.default_rng(3)
    g = build_geometric_graph(500, 0.074, 0.6, seed=rng)
    pts = np.random.default_rng(3).uniform(0, 1, size=(500, 2))
    np.testing.assert_array_equal(g.coords, pts)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    w = np.exp(-d2 / (2 * 0.074**2))
    i, j = np.nonzero(np.triu(w >= 0.6, k=1))
    assert g.edge_count == len(i)
    np.testing.assert_array_equal(g.edges[:, :2], np.column_stack([i, j]))
    np.testing.assert_allclose(g.edges[:, 2], w[i, j], rtol=1e-15)
    # regression fixture for this seed
    assert 1900 < g.edge_count < 2300


def test_build_is_deterministic():
    a = build_geometric_graph(200, 0.1, 0.6, seed=42)
    b = build_geometric_graph(200, 0.1, 0.6, seed=42)
    assert a.edges.tobytes() == b.edges.tobytes()


@pytest.mark.parametrize("bad", [
    dict(edges=[[0, 0, 1.0]]),
    dict(edges=[[0, 1, -1.0]]),
    dict(edges=[[0, 1, 1.0], [1, 0, 2.0]]),
    dict(edges=[[0, 5, 1.0]]),
])
def test_invalid_graphs_rejected(bad):
    with pytest.raises(ValueError):
        WeightedGraph(3, np.array(bad["edges"], dtype=float))


def test_laplacian_small_cases():
    np.testing.assert_array_equal(laplacian(two_node()).toarray(), [[1, -1], [-1, 1]])
    L = laplacian(path_graph(3))
    np.testing.assert_array_equal(L @ np.array([1.0, 0, 0]), [1, -1, 0])


def test_laplacian_row_sums_and_symmetry():
    for seed in range(5):
        L = laplacian(connected_graph(40, seed * 10))
        assert np.abs(L.sum(axis=1)).max() <= 1e-10
        assert abs(L - L.T).max() == 0


def test_normalized_laplacian():
    np.testing.assert_allclose(normalized_laplacian(two_node()).toarray(), [[1, -1], [-1, 1]])
    k3 = WeightedGraph(3, np.array([[0, 1, 1.0], [0, 2, 1.0], [1, 2, 1.0]]))
    np.testing.assert_allclose(np.linalg.eigvalsh(normalized_laplacian(k3).toarray()), [0, 1.5, 1.5], atol=1e-12)
    g = connected_graph(30, 1)
    Ln = normalized_laplacian(g).toarray()
    ev = np.linalg.eigvalsh(Ln)
    assert ev[0] == pytest.approx(0, abs=1e-12) and ev[-1] <= 2 + 1e-12
    v = np.sqrt(g.degrees)
    np.testing.assert_allclose(Ln @ v, 0, atol=1e-12)


def test_normalized_laplacian_isolated_node():
    g = WeightedGraph(3, np.array([[0, 1, 1.0]]))
    with pytest.raises(ValueError, match="zero-degree node"):
        normalized_laplacian(g)


def test_lambda_max_bound_examples():
    assert lambda_max_bound(laplacian(two_node()), two_node()) == 2
    p3 = path_graph(3)
    assert lambda_max_bound(laplacian(p3), p3) == 3
    star = WeightedGraph(5, np.array([[0, k, 1.0] for k in range(1, 5)]))
    assert lambda_max_bound(laplacian(star), star) == 5
    assert np.linalg.eigvalsh(laplacian(star).toarray())[-1] == pytest.approx(5)


def test_lambda_max_bound_dominates():
    for seed in range(200):
        n = 5 + seed % 55
        g = build_geometric_graph(n, 0.9 / np.sqrt(n), 0.3, seed=seed)
        if g.edge_count == 0:
            continue
        L = laplacian(g)
        assert lambda_max_bound(L, g) >= np.linalg.eigvalsh(L.toarray())[-1] - 1e-12


def test_is_connected():
    assert is_connected(two_node())
    assert not is_connected(WeightedGraph(2, np.empty((0, 3))))
    tri = [[0, 1, 1], [1, 2, 1], [0, 2, 1], [3, 4, 1], [4, 5, 1], [3, 5, 1], [2, 3, 1]]
    assert is_connected(WeightedGraph(6, np.array(tri, dtype=float)))


def test_smoothness():
    g = connected_graph(25, 4)
    L = laplacian(g)
    assert smoothness(L, np.full(25, 3.0)) == pytest.approx(0, abs=1e-12)
    f = np.random.default_rng(0).normal(size=25)
    m, n, w = g.edges[:, 0].astype(int), g.edges[:, 1].astype(int), g.edges[:, 2]
    assert smoothness(L, f, 1) == pytest.approx(np.sum(w * (f[m] - f[n]) ** 2), rel=1e-9)
    assert smoothness(laplacian(two_node()), np.array([1.0, 0.0]), 2) == pytest.approx(2)


def test_file_round_trips(tmp_path):
    g = connected_graph(20, 2)
    save_graph(g, tmp_path / "g.json")
    h = load_graph(tmp_path / "g.json")
    assert h.edges.tobytes() == g.edges.tobytes() and h.coords.tobytes() == g.coords.tobytes()
    f = np.random.default_rng(1).normal(size=20) * 1e-7
    save_signal(f, tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "value"
    np.testing.assert_array_equal(load_signal(tmp_path / "f.csv"), f)
