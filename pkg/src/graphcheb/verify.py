"""Desk-scale property suites: equivalence, message counts and error bounds.

Each suite draws small random instances from a seeded generator and
returns a :class:`SuiteResult`.  ``corrupt=True`` perturbs the coefficients
handed to the simulator, which must make the equivalence suite fail.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chebyshev import (ChebyshevApprox, apply_adjoint_approx, apply_approx, apply_gram_approx,
                        chebyshev_coefficients, residual_sup, verify_spectral_bound)
from .denoising import verify_lasso_bound
from .distsim import init_network, run_adjoint, run_forward, run_gram
from .filters import heat_multiplier, tikhonov_multiplier
from .graph import WeightedGraph, build_geometric_graph, is_connected, lambda_max_bound, laplacian
from .spectral import Multiplier, MultiplierUnion, apply_multiplier_exact, eigendecompose

__all__ = ["SuiteResult", "random_connected_graph", "random_union", "run_suites", "SUITES"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cases": self.cases, "worst": self.worst,
                "detail": self.detail}


def random_connected_graph(rng: np.random.Generator, n_min: int = 8, n_max: int = 60) -> WeightedGraph:
    """Connected random geometric graph with a density that keeps it connected most of the time."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        sigma = 0.9 / np.sqrt(n)
        g = build_geometric_graph(n, sigma, 0.3, seed=rng)
        if is_connected(g):
            return g


def _heat(lam, t):
    return np.exp(-t * np.asarray(lam, dtype=float))


def _band(lam, a, b):
    lam = np.asarray(lam, dtype=float)
    return b * lam * np.exp(-a * lam)


def random_union(rng: np.random.Generator, eta: int) -> MultiplierUnion:
    """Smooth random multipliers: heat kernels and band-pass bumps."""
    parts = []
    for j in range(eta):
        if j % 2 == 0:
            t = float(rng.uniform(0.05, 1.0))
            parts.append(Multiplier(lambda lam, t=t: _heat(lam, t), name=f"heat{t:.3f}"))
        else:
            a, b = float(rng.uniform(0.2, 1.0)), float(rng.uniform(0.5, 2.0))
            parts.append(Multiplier(lambda lam, a=a, b=b: _band(lam, a, b), name="band"))
    return MultiplierUnion(parts)


def _corrupted(approx: ChebyshevApprox) -> ChebyshevApprox:
    c = approx.coefficients.copy()
    c[0, 1] += 1e-6
    return replace(approx, coefficients=c)


def suite_equivalence(rng, cases: int, corrupt: bool = False) -> SuiteResult:
    """Simulated runs match the centralized recurrence to 1e-12."""
    worst = 0.0
    for _ in range(cases):
        g = random_connected_graph(rng, 8, 100)
        L = laplacian(g)
        eta = int(rng.integers(1, 9))
        K = int(rng.integers(1, 31))
        approx = chebyshev_coefficients(random_union(rng, eta), lambda_max_bound(L, g), K)
        f = rng.normal(size=g.node_count)
        a = rng.normal(size=eta * g.node_count)
        sim = init_network(g, f, _corrupted(approx) if corrupt else approx)
        fw, _ = run_forward(sim)
        ad, _ = run_adjoint(sim, a)
        gr, _ = run_gram(sim)
        err = max(np.max(np.abs(fw - apply_approx(L, approx, f))),
                  np.max(np.abs(ad - apply_adjoint_approx(L, approx, a))),
                  np.max(np.abs(gr - apply_gram_approx(L, approx, f))))
        worst = max(worst, float(err))
    return SuiteResult("equivalence", worst <= 1e-12, cases, worst, "max-abs deviation")


def suite_message_counts(rng, cases: int) -> SuiteResult:
    """Forward ``2K|E|`` scalars; adjoint ``2K|E|`` messages of length eta; Gram ``4K|E|``."""
    bad = 0
    for _ in range(cases):
        g = random_connected_graph(rng, 8, 80)
        L = laplacian(g)
        eta = int(rng.integers(1, 6))
        K = int(rng.integers(1, 21))
        approx = chebyshev_coefficients(random_union(rng, eta), lambda_max_bound(L, g), K)
        E = g.edge_count
        sim = init_network(g, rng.normal(size=g.node_count), approx)
        _, tf = run_forward(sim)
        _, ta = run_adjoint(sim, rng.normal(size=eta * g.node_count))
        _, tg = run_gram(sim)
        ok = (tf.edge_messages == 2 * K * E and tf.scalar_volume == 2 * K * E
              and ta.edge_messages == 2 * K * E and ta.scalar_volume == 2 * K * E * eta
              and tg.edge_messages == 4 * K * E and tg.scalar_volume == 4 * K * E)
        bad += not ok
    return SuiteResult("message_counts", bad == 0, cases, float(bad), "cases with a count mismatch")


def suite_spectral_bound(rng, cases: int) -> SuiteResult:
    """``||Phi - Phi~||_2 <= B(K) sqrt(eta N) + 1e-8``."""
    worst = -np.inf
    for _ in range(cases):
        g = random_connected_graph(rng, 8, 60)
        L = laplacian(g)
        eta = int(rng.integers(1, 5))
        K = int(rng.integers(1, 21))
        u = random_union(rng, eta)
        approx = chebyshev_coefficients(u, lambda_max_bound(L, g), K)
        lhs, rhs = verify_spectral_bound(eigendecompose(L), u, approx, p=L.toarray())
        worst = max(worst, lhs - rhs)
    return SuiteResult("spectral_bound", worst <= 1e-8, cases, float(worst), "max of lhs - rhs")


def suite_decay(rng=None, cases: int = 0) -> SuiteResult:
    """Heat kernel on ``[0, 10]``: sup residual strictly decreasing in K, tiny at K=40."""
    h = heat_multiplier(1.0)
    res = [residual_sup(h, chebyshev_coefficients(h, 10.0, K)) for K in (5, 10, 20, 40)]
    ok = all(a > b for a, b in zip(res, res[1:])) and res[-1] <= 1e-8
    return SuiteResult("decay", ok, 4, float(res[-1]), "residuals " + ", ".join(f"{r:.3g}" for r in res))


def suite_lasso_bound(rng, cases: int) -> SuiteResult:
    """Lasso perturbation bound on small instances."""
    worst = -np.inf
    for _ in range(cases):
        g = random_connected_graph(rng, 6, 20)
        L = laplacian(g)
        n = g.node_count
        eta = int(rng.integers(1, 4))
        K = int(rng.integers(2, 12))
        u = random_union(rng, eta)
        approx = chebyshev_coefficients(u, lambda_max_bound(L, g), K)
        y = rng.normal(size=n)
        mu = rng.uniform(0.05, 0.5, size=eta * n)
        lhs, rhs = verify_lasso_bound(eigendecompose(L), u, approx, y, mu, p=L.toarray(), tol=1e-12)
        worst = max(worst, lhs - rhs)
    return SuiteResult("lasso_bound", worst <= 0.0, cases, float(worst), "max of lhs - rhs")


def suite_tikhonov(rng, cases: int) -> SuiteResult:
    """Exact Tikhonov multiplier equals the dense solve of ``(tau I + 2 L^r) f = tau y``."""
    worst = 0.0
    for _ in range(cases):
        g = random_connected_graph(rng, 6, 60)
        L = laplacian(g).toarray()
        tau = float(rng.uniform(0.1, 10.0))
        r = int(rng.integers(1, 4))
        y = rng.normal(size=g.node_count)
        ref = np.linalg.solve(tau * np.eye(g.node_count) + 2.0 * np.linalg.matrix_power(L, r), tau * y)
        out = apply_multiplier_exact(eigendecompose(L), tikhonov_multiplier(tau, r), y)
        worst = max(worst, float(np.linalg.norm(out - ref) / np.linalg.norm(ref)))
    return SuiteResult("tikhonov_closed_form", worst <= 1e-9, cases, worst, "relative 2-norm error")


SUITES = ("equivalence", "message_counts", "spectral_bound", "decay", "lasso_bound", "tikhonov_closed_form")


def run_suites(cases: int = 20, seed: int = 0, corrupt: bool = False) -> list[SuiteResult]:
    """Run every suite, each on its own random stream."""
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    rngs = [np.random.default_rng(s) for s in streams]
    return [
        suite_equivalence(rngs[0], cases, corrupt),
        suite_message_counts(rngs[1], cases),
        suite_spectral_bound(rngs[2], cases),
        suite_decay(rngs[3]),
        suite_lasso_bound(rngs[4], cases),
        suite_tikhonov(rngs[5], cases),
    ]
