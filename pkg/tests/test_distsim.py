import numpy as np
import pytest
import scipy.sparse as sp

from graphcheb import (Multiplier, MultiplierUnion, WeightedGraph, apply_adjoint_approx, apply_approx,
                       apply_gram_approx, chebyshev_coefficients, export_trace, init_network,
                       lambda_max_bound, laplacian, message_summary, normalized_laplacian, run_adjoint,
                       run_forward, run_gram)

from conftest import connected_graph, path_graph


def heat(t=1.0):
    return Multiplier(lambda lam: np.exp(-t * lam))


def triangle():
    return WeightedGraph(3, np.array([[0, 1, 1.0], [0, 2, 2.0], [1, 2, 0.5]]))


def test_forward_matches_centralized_bitwise(graph30, rng):
    L = laplacian(graph30)
    approx = chebyshev_coefficients(MultiplierUnion([heat(), heat(0.1)]), lambda_max_bound(L, graph30), 15)
    f = rng.normal(size=30)
    out, trace = run_forward(init_network(graph30, f, approx))
    np.testing.assert_array_equal(out, apply_approx(L, approx, f))
    assert trace.edge_messages == 2 * 15 * graph30.edge_count


def test_path_identity_multiplier():
    g = path_graph(3)
    approx = chebyshev_coefficients(Multiplier(lambda lam: lam), 4.0, 3)
    out, _ = run_forward(init_network(g, [1.0, 0.0, 0.0], approx))
    np.testing.assert_allclose(out, [1, -1, 0], atol=1e-14)


def test_triangle_message_count():
    g = triangle()
    approx = chebyshev_coefficients(heat(), lambda_max_bound(laplacian(g), g), 15)
    _, trace = run_forward(init_network(g, [1.0, 2.0, 3.0], approx))
    assert trace.edge_messages == 90
    assert message_summary(trace) == {"edge_messages": 90, "scalar_volume": 90}


def test_messages_follow_edges(graph30, tmp_path):
    L = laplacian(graph30)
    approx = chebyshev_coefficients(heat(), lambda_max_bound(L, graph30), 6)
    sim = init_network(graph30, np.ones(30), approx, audit=True)
    _, trace = run_forward(sim)
    rec = trace.records
    W = graph30.adjacency.toarray()
    assert np.all(W[rec[:, 1], rec[:, 2]] > 0)
    assert rec[:, 0].min() == 1 and rec[:, 0].max() == 6
    # every round, every node talks to each neighbor exactly once
    for r in range(1, 7):
        pairs = rec[rec[:, 0] == r][:, 1:3]
        assert len({tuple(p) for p in pairs}) == len(pairs) == 2 * graph30.edge_count
    export_trace(trace, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "round,sender,receiver,payload_len" and len(lines) == len(rec) + 1
    with pytest.raises(ValueError):
        export_trace(run_forward(init_network(graph30, np.ones(30), approx))[1], tmp_path / "u.csv")


def test_adjoint_and_gram(graph30, rng):
    L = laplacian(graph30)
    eta = 3
    approx = chebyshev_coefficients([heat(), heat(2), Multiplier(lambda lam: lam)],
                                    lambda_max_bound(L, graph30), 10)
    f, a = rng.normal(size=30), rng.normal(size=eta * 30)
    sim = init_network(graph30, f, approx)
    ad, ta = run_adjoint(sim, a)
    np.testing.assert_array_equal(ad, apply_adjoint_approx(L, approx, a))
    assert ta.edge_messages == 2 * 10 * graph30.edge_count
    assert ta.scalar_volume == eta * ta.edge_messages
    gr, tg = run_gram(sim)
    np.testing.assert_array_equal(gr, apply_gram_approx(L, approx, f))
    assert tg.edge_messages == 4 * 10 * graph30.edge_count
    with pytest.raises(ValueError, match="size mismatch"):
        run_adjoint(sim, np.ones(31))


def test_engines_and_schedules_agree(rng):
    g = connected_graph(25, 4)
    L = laplacian(g)
    approx = chebyshev_coefficients(MultiplierUnion([heat(), heat(0.3)]), lambda_max_bound(L, g), 12)
    f = rng.normal(size=25)
    ref, _ = run_forward(init_network(g, f, approx))
    for order in (None, rng.permutation(25), rng.permutation(25)):
        out, _ = run_forward(init_network(g, f, approx, engine="nodewise", node_order=order))
        np.testing.assert_array_equal(out, ref)


def test_custom_operator(graph30, rng):
    Ln = normalized_laplacian(graph30)
    approx = chebyshev_coefficients(heat(), 2.0, 8)
    f = rng.normal(size=30)
    out, _ = run_forward(init_network(graph30, f, approx, operator=Ln))
    np.testing.assert_array_equal(out, apply_approx(Ln, approx, f))
    # asymmetric rows are fine as long as they sit on edges
    d = np.asarray(graph30.adjacency.sum(axis=1)).ravel()
    P = laplacian(graph30) @ sp.diags(1.0 / d)
    out, _ = run_forward(init_network(graph30, f, approx, operator=P))
    np.testing.assert_allclose(out, apply_approx(sp.csr_matrix(P), approx, f), rtol=0, atol=1e-13)


def test_init_errors(graph30):
    approx = chebyshev_coefficients(heat(), 2.0, 3)
    bad = sp.csr_matrix(np.ones((30, 30)))
    with pytest.raises(ValueError, match="not graph neighbors"):
        init_network(graph30, np.ones(30), approx, operator=bad)
    with pytest.raises(ValueError, match="disconnected"):
        init_network(WeightedGraph(3, np.array([[0, 1, 1.0]])), np.ones(3), approx)
    with pytest.raises(ValueError):
        init_network(graph30, np.ones(29), approx)
    with pytest.raises(ValueError):
        init_network(graph30, np.ones(30), approx, engine="threads")


def test_zero_signal_and_zero_coefficients(graph30):
    approx = chebyshev_coefficients(heat(), 10.0, 5)
    out, _ = run_forward(init_network(graph30, np.zeros(30), approx))
    assert not np.any(out)
    zero = chebyshev_coefficients(Multiplier(lambda lam: 0 * lam), 10.0, 5)
    out, trace = run_forward(init_network(graph30, np.ones(30), zero))
    assert not np.any(out) and trace.edge_messages == 2 * 5 * graph30.edge_count
