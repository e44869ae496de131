"""Jacobi iteration baselines for ``Q x = y`` and the convergence comparison.

For a multiplier ``g`` with respect to a matrix ``P``, computing ``R y``
amounts to solving ``Q x = y`` with ``Q = sum_l (1 / g(lam_l)) chi_l chi_l^T``.
Splitting ``Q = Q_D - Q_O`` (diagonal minus off-diagonal part) gives the
Jacobi iteration ``x <- Q_D^{-1} (Q_O x + y)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .chebyshev import _recurrence, chebyshev_coefficients
from .graph import gershgorin_bound
from .spectral import Multiplier, _check_cap, eigendecompose

__all__ = [
    "JacobiSystem",
    "build_jacobi_system",
    "multiplier_jacobi_system",
    "jacobi_iterate",
    "spectral_radius_iteration",
    "xi_sequence",
    "jacobi_cheb_accelerated",
    "ComparisonCurves",
    "convergence_compare",
    "save_curves",
]


@dataclass(frozen=True)
class JacobiSystem:
    """``Q = diag(q_diag) - q_off`` with right-hand side ``rhs``.

    ``q_off`` is sparse when ``Q`` inherits the sparsity of ``P`` and a dense
    array otherwise.
    """

    q_diag: np.ndarray
    q_off: object
    rhs: np.ndarray
    note: str = ""

    def __post_init__(self):
        if np.any(self.q_diag <= 0):
            raise ValueError("diagonal of Q must be positive")

    @property
    def n(self) -> int:
        return len(self.q_diag)

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.q_off)

    def matrix(self) -> np.ndarray:
        off = self.q_off.toarray() if self.is_sparse else np.asarray(self.q_off)
        return np.diag(self.q_diag) - off

    def with_rhs(self, y) -> "JacobiSystem":
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ValueError("size mismatch between system and right-hand side")
        return replace(self, rhs=y)

    def step(self, x: np.ndarray) -> np.ndarray:
        return (self.q_off @ x + self.rhs) / self.q_diag


def _split(Q, y, note: str) -> JacobiSystem:
    if sp.issparse(Q):
        Q = sp.csr_matrix(Q)
        diag = Q.diagonal()
        off = sp.csr_matrix(sp.diags(diag) - Q)
        off.eliminate_zeros()
        off.sort_indices()
    else:
        Q = np.asarray(Q, dtype=float)
        diag = np.diag(Q).copy()
        off = np.diag(diag) - Q
    n = len(diag)
    y = np.zeros(n) if y is None else np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise ValueError("size mismatch between system and right-hand side")
    return JacobiSystem(diag, off, y, note)


def build_jacobi_system(p, tau: float, y=None) -> JacobiSystem:
    """System ``(I + P / tau) x = y``, i.e. ``(tau I + P) F = tau Y`` scaled by ``1/tau``.

    Here ``1/g(lam) = 1 + lam / tau`` is affine, so ``Q`` keeps the sparsity
    of ``P``.  ``p`` may be sparse or dense.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    n = p.shape[0]
    if sp.issparse(p):
        Q = sp.identity(n, format="csr") + sp.csr_matrix(p, dtype=float) / tau
    else:
        Q = np.eye(n) + np.asarray(p, dtype=float) / tau
    return _split(Q, y, f"I + P/{tau:g}")


def multiplier_jacobi_system(p, g: Callable, y=None, dense: bool = True,
                             affine_tol: float = 1e-12) -> JacobiSystem:
    """System ``Q x = y`` for a general multiplier ``g`` with respect to symmetric ``p``.

    With ``dense=True`` ``Q`` is materialized from an eigendecomposition
    (subject to the oracle size cap).  In sparse mode only multipliers with
    affine ``1/g`` are accepted, since anything else fills ``Q`` in.
    """
    if not dense:
        lmax = gershgorin_bound(p)
        pts = np.linspace(0.0, lmax, 7)
        inv = 1.0 / np.asarray(g(pts), dtype=float)
        a, b = np.polyfit(pts, inv, 1)[::-1]
        if not np.all(np.isfinite(inv)) or np.max(np.abs(a + b * pts - inv)) > affine_tol * np.max(np.abs(inv)):
            raise ValueError("dense fallback required")
        P = sp.csr_matrix(p, dtype=float)
        Q = a * sp.identity(P.shape[0], format="csr") + b * P
        return _split(Q, y, "affine 1/g")
    d = eigendecompose(p)
    inv = 1.0 / np.asarray(g(d.eigenvalues), dtype=float)
    if not np.all(np.isfinite(inv)):
        raise ValueError("multiplier vanishes on the spectrum")
    U = d.eigenvectors
    Q = (U * inv) @ U.T
    return _split(0.5 * (Q + Q.T), y, "dense 1/g")


def jacobi_iterate(sys: JacobiSystem, x0=None, iters: int = 1) -> np.ndarray:
    """Iterate history ``[x0, x1, ..., x_iters]`` as an ``(iters + 1, N)`` array."""
    if iters < 1:
        raise ValueError("need at least one iteration")
    x = sys.rhs.copy() if x0 is None else np.array(x0, dtype=float)
    hist = np.empty((iters + 1, sys.n))
    hist[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, iters + 1):
            x = sys.step(x)
            hist[t] = x
    return hist


def spectral_radius_iteration(sys: JacobiSystem) -> float:
    """Largest ``|eigenvalue|`` of ``Q_D^{-1} Q_O`` (dense eigensolve)."""
    _check_cap(sys.n)
    off = sys.q_off.toarray() if sys.is_sparse else np.asarray(sys.q_off)
    s = 1.0 / np.sqrt(sys.q_diag)
    M = s[:, None] * off * s[None, :]  # similar to Q_D^{-1} Q_O
    if np.allclose(M, M.T, rtol=0, atol=1e-13 * max(np.abs(M).max(), 1.0)):
        ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    else:
        ev = np.linalg.eigvals(M)
    return float(np.max(np.abs(ev))) if ev.size else 0.0


def xi_sequence(rho: float, length: int) -> np.ndarray:
    """``xi_0 = 1``, ``xi_1 = rho``, ``xi_{t+1} = 1 / (2 / (rho xi_t) - 1 / xi_{t-1})``."""
    _check_rho(rho)
    xi = np.empty(length)
    xi[0] = 1.0
    if length > 1:
        xi[1] = rho
    for t in range(1, length - 1):
        xi[t + 1] = 1.0 / (2.0 / (rho * xi[t]) - 1.0 / xi[t - 1])
    return xi


def _check_rho(rho: float) -> None:
    if not 0 < rho < 1:
        raise ValueError("acceleration undefined: need 0 < rho < 1")


def jacobi_cheb_accelerated(sys: JacobiSystem, rho: float, x0=None, iters: int = 2) -> np.ndarray:
    """Chebyshev semi-iterative acceleration of the Jacobi iteration.

    Uses ``omega_t = 2 xi_t / (rho xi_{t-1})``, which obeys
    ``omega_{t+1} = 1 / (1 - rho**2 omega_t / 4)`` with ``omega_1 = 2`` and
    ``xi_{t+1} / xi_{t-1} = omega_{t+1} - 1``.  This is the same update
    written with ratios, so ``xi_t`` never underflows.
    """
    _check_rho(rho)
    if iters < 1:
        raise ValueError("need at least one iteration")
    prev = sys.rhs.copy() if x0 is None else np.array(x0, dtype=float)
    hist = np.empty((iters + 1, sys.n))
    hist[0] = prev
    cur = sys.step(prev)
    hist[1] = cur
    omega = 2.0
    for t in range(2, iters + 1):
        omega = 1.0 / (1.0 - 0.25 * rho * rho * omega)
        nxt = omega * sys.step(cur) - (omega - 1.0) * prev
        prev, cur = cur, nxt
        hist[t] = cur
    return hist


@dataclass
class ComparisonCurves:
    """Errors ``||f^(K) - f||_2`` for ``K = 0..K_max``; ``err_jacobi_accel`` is NaN when ``rho >= 1``."""

    K: np.ndarray
    err_cheb: np.ndarray
    err_jacobi: np.ndarray
    err_jacobi_accel: np.ndarray
    rho: float
    lambda_max: float


def _top_eigenvalue(m) -> float:
    M = m.toarray() if sp.issparse(m) else np.asarray(m, dtype=float)
    _check_cap(M.shape[0])
    if np.allclose(M, M.T, rtol=0, atol=1e-13 * max(np.abs(M).max(), 1.0)):
        return float(np.linalg.eigvalsh(0.5 * (M + M.T))[-1])
    return float(np.max(np.linalg.eigvals(M).real))


def _cheb_partial_sums(base, multiplier, lambda_max: float, y: np.ndarray, K_max: int,
                       similarity: Optional[np.ndarray]) -> np.ndarray:
    """Outputs of the order-``K`` approximations for ``K = 1..K_max`` in one recurrence."""
    approx = chebyshev_coefficients(multiplier, lambda_max, K_max)
    c = approx.coefficients[0]
    x = y if similarity is None else y / similarity
    acc = 0.5 * c[0] * x
    outs = np.empty((K_max, len(y)))
    for k, tk in enumerate(_recurrence(base, approx.alpha, x, K_max), start=1):
        acc = acc + c[k] * tk
        outs[k - 1] = acc if similarity is None else similarity * acc
    return outs


def convergence_compare(p, tau: float, f_true, K_max: int, *, kernel=None,
                        lambda_max: float | None = None, x0=None) -> ComparisonCurves:
    """Error curves of the three methods recovering ``f`` from ``y = (I + P / tau) f``.

    The Chebyshev method approximates ``tau / (tau + lam)`` with respect to
    ``p`` at order ``K``; the Jacobi methods run ``K`` iterations from
    ``x0 = y``.  One order of the recurrence and one Jacobi iteration cost
    the same communication.

    Parameters
    ----------
    p : sparse or dense matrix
        The matrix ``P``; may be None when ``kernel`` is given.
    kernel : SSLKernel, optional
        Run the Chebyshev method in the kernel's spectral form (base matrix,
        multiplier ``tau / (tau + g)``, similarity) instead of on ``p``.
    lambda_max : float, optional
        Spectral upper bound for the recurrence.  Defaults to the exact top
        eigenvalue, mirroring the exact ``rho`` handed to the accelerated
        baseline.
    """
    if K_max < 1:
        raise ValueError("K_max must be at least 1")
    if p is None:
        if kernel is None:
            raise ValueError("need a matrix or a kernel")
        p = kernel.matrix if kernel.matrix is not None else kernel.dense()
    f = np.asarray(f_true, dtype=float)
    y = f + (p @ f) / tau
    sys = build_jacobi_system(p, tau, y)

    if kernel is not None:
        base, mult, sim = kernel.base, kernel.multiplier(tau), kernel.similarity
    else:
        base, sim = p, None
        mult = Multiplier(lambda lam: tau / (tau + np.asarray(lam, dtype=float)), name="tau/(tau+lam)")
    lmax = _top_eigenvalue(base) if lambda_max is None else float(lambda_max)

    start = y if x0 is None else np.asarray(x0, dtype=float)
    base_err = np.linalg.norm(start - f)
    cheb = _cheb_partial_sums(base, mult, lmax, y, K_max, sim)
    err_cheb = np.concatenate([[np.linalg.norm(y - f)], np.linalg.norm(cheb - f, axis=1)])
    err_jac = np.linalg.norm(jacobi_iterate(sys, start, K_max) - f, axis=1)
    rho = spectral_radius_iteration(sys)
    if 0 < rho < 1:
        err_acc = np.linalg.norm(jacobi_cheb_accelerated(sys, rho, start, K_max) - f, axis=1)
    else:
        err_acc = np.full(K_max + 1, np.nan)
        err_acc[0] = base_err
    return ComparisonCurves(np.arange(K_max + 1), err_cheb, err_jac, err_acc, rho, lmax)


def save_curves(curves: ComparisonCurves, path) -> None:
    """Write ``K,err_cheb,err_jacobi,err_jacobi_accel`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["K", "err_cheb", "err_jacobi", "err_jacobi_accel"])
        for row in zip(curves.K, curves.err_cheb, curves.err_jacobi, curves.err_jacobi_accel):
            w.writerow([int(row[0])] + [format(float(v), ".17g") for v in row[1:]])
