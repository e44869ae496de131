"""Randomized invariants checked with hypothesis."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcheb import (ChebyshevApprox, WeightedGraph, apply_adjoint_approx, apply_approx, apply_gram_approx,
                       build_geometric_graph, chebyshev_eval, gram_coefficients, init_network, is_connected,
                       lambda_max_bound, laplacian, run_adjoint, run_forward, run_gram, soft_threshold)

seeds = st.integers(0, 2**32 - 1)


def _graph(seed, n):
    rng = np.random.default_rng(seed)
    while True:
        g = build_geometric_graph(n, 1.0 / np.sqrt(n), 0.3, seed=rng)
        if is_connected(g):
            return g, rng


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(3, 40), eta=st.integers(1, 4), K=st.integers(1, 20))
def test_simulator_equals_recurrence(seed, n, eta, K):
    g, rng = _graph(seed, n)
    L = laplacian(g)
    approx = ChebyshevApprox(rng.normal(size=(eta, K + 1)), lambda_max_bound(L, g))
    f, a = rng.normal(size=n), rng.normal(size=eta * n)
    sim = init_network(g, f, approx)
    assert np.array_equal(run_forward(sim)[0], apply_approx(L, approx, f))
    assert np.array_equal(run_adjoint(sim, a)[0], apply_adjoint_approx(L, approx, a))
    assert np.array_equal(run_gram(sim)[0], apply_gram_approx(L, approx, f))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, eta=st.integers(1, 5), K=st.integers(1, 25), lmax=st.floats(0.1, 50))
def test_gram_identity(seed, eta, K, lmax):
    rng = np.random.default_rng(seed)
    approx = ChebyshevApprox(rng.normal(size=(eta, K + 1)), lmax)
    x = np.linspace(0, lmax, 257)
    lhs = np.sum(chebyshev_eval(approx, x) ** 2, axis=0)
    rhs = chebyshev_eval(ChebyshevApprox(gram_coefficients(approx).d[None, :], lmax), x)[0]
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.abs(approx.coefficients).sum() ** 2)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(2, 30))
def test_laplacian_psd_and_bounded(seed, n):
    g, _ = _graph(seed, n)
    L = laplacian(g).toarray()
    lam = np.linalg.eigvalsh(L)
    assert lam[0] > -1e-10
    assert lam[-1] <= lambda_max_bound(laplacian(g), g) + 1e-10
    assert np.allclose(L.sum(axis=1), 0)


@given(z=st.floats(-1e6, 1e6), t=st.floats(0, 1e6))
def test_soft_threshold_shrinks(z, t):
    out = soft_threshold(z, t)
    assert abs(out) <= abs(z)
    assert out == 0 or np.sign(out) == np.sign(z)
    assert abs(abs(z) - abs(out) - min(t, abs(z))) <= 1e-9 * max(1.0, abs(z))
