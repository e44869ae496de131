import numpy as np
import pytest

from graphcheb import (KERNEL_KINDS, LabelMatrix, WeightedGraph, laplacian, load_labels, normalized_laplacian,
                       save_labels, ssl_centralized, ssl_classify, ssl_kernel)
from graphcheb.experiments import two_clique_graph

from conftest import connected_graph

PARAMS = {"laplacian": {"r": 1}, "normalized": {"r": 2}, "ld_inverse": {}, "k_scaling": {"gamma": 0.5},
          "diffusion": {"sigma": 1.0}, "inverse_cosine": {}, "random_walk": {"sigma": 2.5, "r": 2}}


def clique_labels():
    return LabelMatrix.from_pairs(12, [0, 11], [0, 1])


@pytest.mark.parametrize("kind", KERNEL_KINDS)
def test_two_cliques_perfect(kind):
    g = two_clique_graph()
    res = ssl_classify(g, clique_labels(), ssl_kernel(g, kind, **PARAMS[kind]), tau=0.1, K=30)
    np.testing.assert_array_equal(res.predictions, np.repeat([0, 1], 6))


@pytest.mark.parametrize("kind", KERNEL_KINDS)
def test_distributed_approaches_centralized(kind):
    g = connected_graph(30, 6)
    rng = np.random.default_rng(1)
    labels = LabelMatrix.from_pairs(30, rng.choice(30, 8, replace=False), [0, 1, 2, 0, 1, 2, 0, 1])
    kern = ssl_kernel(g, kind, **PARAMS[kind])
    ref = ssl_centralized(kern, labels, 1.0).scores
    errs = [np.abs(ssl_classify(g, labels, kern, 1.0, K=K).scores - ref).max() for K in (5, 10, 20, 40)]
    assert errs[-1] < 1e-3 and errs[-1] < errs[0]


def test_huge_tau_returns_labels():
    g = connected_graph(20, 3)
    classes = np.arange(20) % 3
    labels = LabelMatrix(classes, 3)
    for kind in ("laplacian", "normalized", "random_walk"):
        res = ssl_classify(g, labels, ssl_kernel(g, kind), tau=1e6, K=10)
        np.testing.assert_array_equal(res.predictions, classes)


def test_message_count():
    g = two_clique_graph()
    res = ssl_classify(g, clique_labels(), ssl_kernel(g, "normalized"), tau=1.0, K=7)
    assert res.messages["edge_messages"] == 2 * 2 * 7 * g.edge_count


def test_weight_scaling_invariance():
    g = connected_graph(25, 9)
    g3 = WeightedGraph(g.node_count, g.edges * [1, 1, 3.0])
    labels = LabelMatrix.from_pairs(25, [0, 5, 10, 15], [0, 1, 0, 1])
    for kind in ("normalized", "ld_inverse", "inverse_cosine"):
        a = ssl_classify(g, labels, ssl_kernel(g, kind), 1.0, K=20)
        b = ssl_classify(g3, labels, ssl_kernel(g3, kind), 1.0, K=20)
        np.testing.assert_allclose(a.scores, b.scores, atol=1e-10)


def test_dense_kernels_match_definitions():
    g = connected_graph(15, 2)
    L = laplacian(g).toarray()
    Ln = normalized_laplacian(g).toarray()
    D = np.diag(g.degrees)
    I = np.eye(15)
    np.testing.assert_allclose(ssl_kernel(g, "laplacian", r=2).dense(), L @ L, atol=1e-10)
    np.testing.assert_allclose(ssl_kernel(g, "ld_inverse").dense(), L @ np.linalg.inv(D), atol=1e-12)
    rw = ssl_kernel(g, "random_walk", sigma=2.0, r=2).dense()
    np.testing.assert_allclose(rw, np.linalg.matrix_power(np.linalg.inv(2 * I - Ln), 2), atol=1e-8)
    ks = ssl_kernel(g, "k_scaling", gamma=0.0).dense()
    np.testing.assert_allclose(ks, Ln, atol=1e-12)
    # similarity kernel: spectral form reproduces the sparse matrix
    k = ssl_kernel(g, "ld_inverse")
    s = k.similarity
    U, lam = np.linalg.eigh(Ln)[1], np.linalg.eigh(Ln)[0]
    np.testing.assert_allclose(s[:, None] * ((U * lam) @ U.T) / s[None, :], k.matrix.toarray(), atol=1e-12)


def test_ld_inverse_modes_agree():
    g = connected_graph(20, 5)
    labels = LabelMatrix.from_pairs(20, [1, 2, 3], [0, 1, 1])
    a = ssl_classify(g, labels, ssl_kernel(g, "ld_inverse", mode="similarity"), 2.0, K=30)
    b = ssl_classify(g, labels, ssl_kernel(g, "ld_inverse", mode="raw"), 2.0, K=30)
    np.testing.assert_allclose(a.scores, b.scores, atol=1e-8)


def test_kernel_errors():
    g = two_clique_graph()
    with pytest.raises(ValueError, match="sigma >= 2"):
        ssl_kernel(g, "random_walk", sigma=1.5)
    with pytest.raises(ValueError):
        ssl_kernel(g, "polynomial")
    with pytest.raises(ValueError):
        ssl_kernel(g, "laplacian", r=0)
    with pytest.raises(ValueError):
        ssl_kernel(g, "k_scaling", gamma=-1)
    with pytest.raises(ValueError):
        ssl_kernel(g, "normalized").multiplier(0.0)
    with pytest.raises(ValueError):
        ssl_classify(g, LabelMatrix.from_pairs(5, [0], [0]), ssl_kernel(g, "normalized"), 1.0)


def test_label_matrix_and_files(tmp_path):
    lab = LabelMatrix.from_pairs(5, [0, 3], [1, 0])
    assert lab.n_classes == 2
    np.testing.assert_array_equal(lab.Y, [[0, 1], [0, 0], [0, 0], [1, 0], [0, 0]])
    save_labels(lab, tmp_path / "l.csv")
    assert (tmp_path / "l.csv").read_text().splitlines()[0] == "node_id,class"
    back = load_labels(tmp_path / "l.csv", 5)
    np.testing.assert_array_equal(back.classes, lab.classes)
    with pytest.raises(ValueError):
        LabelMatrix.from_pairs(5, [0, 0], [0, 1])
    with pytest.raises(ValueError):
        LabelMatrix(np.full(4, -1), 2)
