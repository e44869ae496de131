"""Shifted Chebyshev approximation of graph multiplier unions.

A multiplier ``g`` on ``[0, lambda_max]`` is replaced by the truncated
expansion ``p(x) = c_0 / 2 + sum_{k=1}^K c_k Tbar_k(x)`` where
``Tbar_k(x) = T_k((x - alpha) / alpha)`` and ``alpha = lambda_max / 2``.
Applying ``p(L)`` to a signal only needs ``K`` sparse mat-vec products
through the three-term recurrence

    Tbar_k(L) f = (2 / alpha) (L - alpha I) Tbar_{k-1}(L) f - Tbar_{k-2}(L) f.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import chebyshev as npcheb
from scipy.fft import dct

from .spectral import SpectralDecomposition, as_union, operator_matrix

__all__ = [
    "ChebyshevApprox",
    "GramCoefficients",
    "DEFAULT_ORDER",
    "chebyshev_coefficients",
    "chebyshev_eval",
    "residual_sup",
    "apply_approx",
    "apply_adjoint_approx",
    "gram_coefficients",
    "apply_gram_approx",
    "approx_operator_matrix",
    "verify_spectral_bound",
    "save_coefficients",
    "load_coefficients",
]

DEFAULT_ORDER = 20
DEFAULT_QUADRATURE = 500


@dataclass(frozen=True)
class ChebyshevApprox:
    """Coefficients ``c[j, k]`` of an order-``K`` approximation on ``[0, lambda_max]``.

    The same ``lambda_max`` drives both the coefficients and the recurrence,
    so it travels with the coefficients.
    """

    coefficients: np.ndarray
    lambda_max: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        if c.ndim != 2 or c.shape[1] < 2:
            raise ValueError("coefficient array must be eta x (K+1) with K >= 1")
        if not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "lambda_max", float(self.lambda_max))

    @property
    def order(self) -> int:
        return self.coefficients.shape[1] - 1

    @property
    def eta(self) -> int:
        return self.coefficients.shape[0]

    @property
    def alpha(self) -> float:
        return self.lambda_max / 2.0


@dataclass(frozen=True)
class GramCoefficients:
    """Expansion ``d`` of ``sum_j p_j(x)**2`` in the shifted Chebyshev basis (length ``2K+1``)."""

    d: np.ndarray
    lambda_max: float

    @property
    def order(self) -> int:
        return len(self.d) - 1

    @property
    def alpha(self) -> float:
        return self.lambda_max / 2.0


def chebyshev_coefficients(u, lambda_max: float, K: int = DEFAULT_ORDER,
                           q: int = DEFAULT_QUADRATURE) -> ChebyshevApprox:
    """Chebyshev coefficients of each multiplier in ``u``.

    The integral ``(2/pi) int_0^pi cos(k t) g(alpha (cos t + 1)) dt`` is
    evaluated with the ``q``-point midpoint rule ``t_i = pi (i + 1/2) / q``,
    which is Gauss-Chebyshev quadrature in the variable ``cos t``.  The sums
    are a type-II DCT of the sampled multiplier, computed with ``scipy.fft``
    (more accurate than forming ``cos(k t_i)`` explicitly for large ``k``).
    """
    if K < 1:
        raise ValueError("order K must be at least 1")
    q = max(int(q), K + 1)
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    u = as_union(u)
    alpha = lambda_max / 2.0
    theta = np.pi * (np.arange(q) + 0.5) / q
    vals = u.evaluate(alpha * (np.cos(theta) + 1.0))
    if not np.all(np.isfinite(vals)):
        raise ValueError("multiplier not evaluable at a quadrature node")
    coeffs = dct(vals, type=2, axis=-1)[:, : K + 1] / q
    return ChebyshevApprox(coeffs, lambda_max)


def chebyshev_eval(approx: ChebyshevApprox, lam) -> np.ndarray:
    """Values ``p_j(lam)`` as an ``(eta, len(lam))`` array."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    y = (lam - approx.alpha) / approx.alpha
    c = approx.coefficients.copy()
    c[:, 0] *= 0.5
    return np.vstack([npcheb.chebval(y, cj) for cj in c])


def residual_sup(u, approx: ChebyshevApprox, grid_points: int = 10_000) -> float:
    """Grid estimate of ``max_j sup |g_j - p_j|`` over ``[0, lambda_max]``."""
    if grid_points < 1000:
        raise ValueError("use at least 1000 grid points")
    u = as_union(u)
    lam = np.linspace(0.0, approx.lambda_max, grid_points)
    return float(np.max(np.abs(u.evaluate(lam) - chebyshev_eval(approx, lam))))


# --- centralized application -----------------------------------------------

def _scaled_operators(l, alpha: float):
    """``(1/alpha) L`` and ``(2/alpha) L`` with identical sparsity and sorted rows."""
    L = sp.csr_matrix(l, dtype=float, copy=True)
    L.sort_indices()
    s1 = L.copy()
    s1.data = (1.0 / alpha) * L.data
    s2 = L.copy()
    s2.data = 2.0 * s1.data
    return s1, s2


def _recurrence(l, alpha: float, x: np.ndarray, K: int):
    """Yield ``Tbar_k(L) x`` for ``k = 1..K``."""
    s1, s2 = _scaled_operators(l, alpha)
    if s1.shape[0] != x.shape[0]:
        raise ValueError("size mismatch between operator and signal")
    prev = x
    cur = s1 @ x - x
    yield cur
    for _ in range(2, K + 1):
        nxt = s2 @ cur - 2.0 * cur - prev
        prev, cur = cur, nxt
        yield cur


def apply_approx(l, approx: ChebyshevApprox, f) -> np.ndarray:
    """Stacked ``eta * N`` output of the order-``K`` approximate union operator."""
    f = np.asarray(f, dtype=float)
    c = approx.coefficients
    out = np.outer(0.5 * c[:, 0], f)
    for k, tk in enumerate(_recurrence(l, approx.alpha, f, approx.order), start=1):
        out += np.outer(c[:, k], tk)
    return out.reshape(-1)


def apply_adjoint_approx(l, approx: ChebyshevApprox, a) -> np.ndarray:
    """``sum_j p_j(L) a_j`` for a stacked coefficient vector ``a``."""
    a = np.asarray(a, dtype=float)
    c = approx.coefficients
    eta = approx.eta
    if a.size % eta:
        raise ValueError("size mismatch: coefficient vector is not eta * N long")
    X = np.ascontiguousarray(a.reshape(eta, -1).T)
    acc = X * (0.5 * c[:, 0])
    for k, tk in enumerate(_recurrence(l, approx.alpha, X, approx.order), start=1):
        acc += tk * c[:, k]
    out = acc[:, 0].copy()
    for j in range(1, eta):
        out += acc[:, j]
    return out


def gram_coefficients(approx: ChebyshevApprox) -> GramCoefficients:
    """Expand ``sum_j p_j**2`` with ``T_k T_m = (T_{k+m} + T_{|k-m|}) / 2``."""
    c = approx.coefficients
    K = approx.order
    b = c.copy()
    b[:, 0] *= 0.5  # p_j = sum_k b_jk T_k
    e = np.zeros(2 * K + 1)
    for bj in b:
        outer = np.outer(bj, bj)
        for k in range(K + 1):
            for m in range(K + 1):
                e[k + m] += 0.5 * outer[k, m]
                e[abs(k - m)] += 0.5 * outer[k, m]
    d = e.copy()
    d[0] *= 2.0  # constant term is carried as d_0 / 2
    return GramCoefficients(d, approx.lambda_max)


def apply_gram_approx(l, approx: ChebyshevApprox, f, gram: GramCoefficients | None = None) -> np.ndarray:
    """``Phi~^* Phi~ f`` through a single order-``2K`` recurrence."""
    gram = gram_coefficients(approx) if gram is None else gram
    f = np.asarray(f, dtype=float)
    d = gram.d
    out = 0.5 * d[0] * f
    for k, tk in enumerate(_recurrence(l, gram.alpha, f, gram.order), start=1):
        out = out + d[k] * tk
    return out


def approx_operator_matrix(l, approx: ChebyshevApprox) -> np.ndarray:
    """Dense ``(eta N) x N`` matrix of the approximate operator, via the recurrence."""
    n = l.shape[0]
    eye = np.eye(n)
    c = approx.coefficients
    blocks = np.einsum("j,nm->jnm", 0.5 * c[:, 0], eye)
    for k, tk in enumerate(_recurrence(l, approx.alpha, eye, approx.order), start=1):
        blocks += np.einsum("j,nm->jnm", c[:, k], tk)
    return blocks.reshape(-1, n)


def verify_spectral_bound(d: SpectralDecomposition, u, approx: ChebyshevApprox,
                          p=None, grid_points: int = 10_000) -> tuple[float, float]:
    """``(||Phi - Phi~||_2, B(K) sqrt(eta N))`` with the norm from a dense SVD.

    ``p`` is the matrix the recurrence runs on; if omitted it is rebuilt
    from the decomposition.
    """
    u = as_union(u)
    if p is None:
        U = d.eigenvectors
        p = (U * d.eigenvalues) @ U.T
    diff = operator_matrix(d, u) - approx_operator_matrix(p, approx)
    lhs = float(np.linalg.svd(diff, compute_uv=False)[0])
    rhs = residual_sup(u, approx, grid_points) * np.sqrt(u.eta * d.n)
    return lhs, float(rhs)


def save_coefficients(approx: ChebyshevApprox, path) -> None:
    payload = {
        "lambda_max": approx.lambda_max,
        "K": approx.order,
        "eta": approx.eta,
        "coeffs": approx.coefficients.tolist(),
    }
    Path(path).write_text(json.dumps(payload))


def load_coefficients(path) -> ChebyshevApprox:
    payload = json.loads(Path(path).read_text())
    c = np.asarray(payload["coeffs"], dtype=float)
    if c.shape != (payload["eta"], payload["K"] + 1):
        raise ValueError("coefficient array does not match K and eta")
    return ChebyshevApprox(c, payload["lambda_max"])
