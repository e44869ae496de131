import numpy as np
import pytest

from graphcheb import (Multiplier, MultiplierUnion, adjoint_union_exact, apply_multiplier_exact,
                       apply_union_exact, commutes, eigendecompose, gft, igft, laplacian, operator_matrix)

from conftest import connected_graph, path_graph, two_node


def heat(t=1.0):
    return Multiplier(lambda lam: np.exp(-t * lam), name="heat")


def test_two_node_decomposition():
    d = eigendecompose(laplacian(two_node()))
    np.testing.assert_allclose(d.eigenvalues, [0, 2], atol=1e-14)
    np.testing.assert_allclose(np.abs(d.eigenvectors[:, 0]), [2**-0.5, 2**-0.5])


def test_path_spectrum_and_identity():
    np.testing.assert_allclose(eigendecompose(laplacian(path_graph(3))).eigenvalues, [0, 1, 3], atol=1e-12)
    np.testing.assert_allclose(eigendecompose(np.eye(4)).eigenvalues, 1.0)


def test_decomposition_invariants(graph30):
    L = laplacian(graph30).toarray()
    d = eigendecompose(L)
    U, lam = d.eigenvectors, d.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    assert np.linalg.norm(L @ U - U * lam, axis=0).max() <= 1e-8 * np.linalg.norm(L, 2)
    np.testing.assert_allclose(U.T @ U, np.eye(30), atol=1e-10)
    assert abs(lam[0]) <= 1e-10 and lam[1] > 1e-8
    fiedler = U[:, 1]
    assert fiedler.min() < 0 < fiedler.max()


def test_eigendecompose_errors(monkeypatch):
    with pytest.raises(ValueError, match="matrix not symmetric"):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))
    monkeypatch.setenv("GRAPHCHEB_ORACLE_CAP", "10")
    with pytest.raises(ValueError, match="oracle size cap"):
        eigendecompose(np.eye(11))


def test_gft_examples(graph30, rng):
    d = eigendecompose(laplacian(graph30))
    np.testing.assert_allclose(gft(d, d.eigenvectors[:, 3]), np.eye(30)[3], atol=1e-12)
    fhat = gft(d, np.full(30, 2.0))
    assert abs(fhat[0]) == pytest.approx(2 * np.sqrt(30))
    np.testing.assert_allclose(fhat[1:], 0, atol=1e-12)
    f = rng.normal(size=30)
    assert np.linalg.norm(gft(d, f)) == pytest.approx(np.linalg.norm(f), rel=1e-12)
    for x in (f, np.ones(30), d.eigenvectors[:, 5]):
        np.testing.assert_allclose(igft(d, gft(d, x)), x, atol=1e-10)
    with pytest.raises(ValueError, match="size mismatch"):
        gft(d, np.ones(29))


def test_apply_multiplier_examples(graph30, rng):
    L = laplacian(graph30).toarray()
    d = eigendecompose(L)
    f = rng.normal(size=30)
    np.testing.assert_allclose(apply_multiplier_exact(d, lambda lam: np.ones_like(lam), f), f, atol=1e-12)
    np.testing.assert_allclose(apply_multiplier_exact(d, lambda lam: lam, f), L @ f, atol=1e-10)
    d2 = eigendecompose(laplacian(two_node()))
    e2 = np.exp(-2.0)
    np.testing.assert_allclose(apply_multiplier_exact(d2, heat(), [1.0, 0.0]), [(1 + e2) / 2, (1 - e2) / 2])
    with np.errstate(divide="ignore"), pytest.raises(ValueError, match="multiplier singular on spectrum"):
        apply_multiplier_exact(d, lambda lam: 1.0 / lam, f)


def test_product_multiplier_is_composition(graph30, rng):
    d = eigendecompose(laplacian(graph30))
    f = rng.normal(size=30)
    g1, g2 = heat(0.3), (lambda lam: 1.0 / (1.0 + lam))
    both = apply_multiplier_exact(d, lambda lam: g1(lam) * g2(lam), f)
    np.testing.assert_allclose(both, apply_multiplier_exact(d, g1, apply_multiplier_exact(d, g2, f)), atol=1e-9)


def test_union_and_adjoint(graph30, rng):
    d = eigendecompose(laplacian(graph30))
    f = rng.normal(size=30)
    one, zero = (lambda lam: np.ones_like(lam)), (lambda lam: np.zeros_like(lam))
    np.testing.assert_allclose(apply_union_exact(d, MultiplierUnion([one, zero]), f),
                               np.concatenate([f, np.zeros(30)]), atol=1e-12)
    u = MultiplierUnion([heat(0.5), Multiplier(lambda lam: lam * np.exp(-lam))])
    out = apply_union_exact(d, u, f)
    np.testing.assert_allclose(out[:30], apply_multiplier_exact(d, u[0], f))
    np.testing.assert_allclose(out[30:], apply_multiplier_exact(d, u[1], f))
    a = rng.normal(size=60)
    assert out @ a == pytest.approx(f @ adjoint_union_exact(d, u, a), rel=1e-12)
    np.testing.assert_allclose(adjoint_union_exact(d, one, f), f, atol=1e-12)
    M = operator_matrix(d, u)
    np.testing.assert_allclose(M @ f, out, atol=1e-12)
    np.testing.assert_allclose(M.T @ a, adjoint_union_exact(d, u, a), atol=1e-12)


def test_operator_matrix_simple(graph30):
    L = laplacian(graph30).toarray()
    d = eigendecompose(L)
    np.testing.assert_allclose(operator_matrix(d, lambda lam: np.ones_like(lam)), np.eye(30), atol=1e-12)
    np.testing.assert_allclose(operator_matrix(d, lambda lam: lam), L, atol=1e-10)


def test_commutes(graph30):
    L = laplacian(graph30).toarray()
    assert commutes(L, L @ L)
    c, s = np.cos(0.4), np.sin(0.4)
    R = np.array([[c, -s], [s, c]])
    B = R @ np.diag([1.0, 3.0]) @ R.T
    assert not commutes(np.diag([1.0, 2.0]), B)
    Psi = operator_matrix(eigendecompose(L), heat())
    assert commutes(Psi, L)
    with pytest.raises(ValueError):
        commutes(np.eye(2), np.eye(3))
