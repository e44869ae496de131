"""Distributed semi-supervised classification with graph kernels.

Each class ``j`` is solved separately as
``argmin_f tau ||f - Y[:, j]||^2 + f^T P f``, whose minimizer is
``tau (tau I + P)^{-1} Y[:, j]``: a multiplier ``tau / (tau + g(lam))``
applied with respect to some base matrix whose spectrum defines ``P``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .chebyshev import chebyshev_coefficients
from .distsim import init_network, message_summary, run_forward
from .graph import WeightedGraph, lambda_max_bound, laplacian, normalized_laplacian
from .spectral import Multiplier, eigendecompose

__all__ = [
    "KERNEL_KINDS",
    "SSLKernel",
    "ssl_kernel",
    "LabelMatrix",
    "SSLResult",
    "ssl_classify",
    "ssl_centralized",
    "load_labels",
    "save_labels",
]

KERNEL_KINDS = ("laplacian", "normalized", "ld_inverse", "k_scaling",
                "diffusion", "inverse_cosine", "random_walk")


def _power(lam, r):
    return np.asarray(lam, dtype=float) ** r


def _inv_power(lam, r):
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        return lam ** (-float(r))


def _identity(lam):
    return np.asarray(lam, dtype=float)


def _reciprocal(lam):
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 / lam


def _diffusion(lam, s2):
    return np.exp(0.5 * s2 * np.asarray(lam, dtype=float))


def _diffusion_inv(lam, s2):
    return np.exp(-0.5 * s2 * np.asarray(lam, dtype=float))


def _cos(lam):
    return np.cos(0.25 * np.pi * np.asarray(lam, dtype=float))


def _sec(lam):
    with np.errstate(divide="ignore"):
        return 1.0 / _cos(lam)


def _walk(lam, sigma, r):
    with np.errstate(divide="ignore"):
        return (sigma - np.asarray(lam, dtype=float)) ** (-float(r))


def _walk_inv(lam, sigma, r):
    return (sigma - np.asarray(lam, dtype=float)) ** float(r)


def _ssl_multiplier(lam, tau, g_inv):
    # tau / (tau + g) written through 1/g so poles of g map to zeros
    h = np.atleast_1d(np.asarray(g_inv(lam), dtype=float))
    out = np.ones_like(h)
    fin = np.isfinite(h)
    out[fin] = tau * h[fin] / (tau * h[fin] + 1.0)
    return out


@dataclass(frozen=True)
class SSLKernel:
    """Regularization matrix ``P`` described through a base matrix.

    ``P = S g(base) S^{-1}`` with ``S = diag(similarity)`` (identity when
    ``similarity`` is None).  ``g_inv`` is ``1 / g``; the multiplier is built
    from it so that poles of ``g`` become zeros and zeros of ``g`` become
    ones.  ``matrix`` holds ``P`` itself when it is sparse.
    """

    kind: str
    base: sp.csr_matrix
    lambda_max: float
    g: Callable
    g_inv: Callable
    matrix: Optional[sp.csr_matrix] = None
    similarity: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def multiplier(self, tau: float) -> Multiplier:
        """``tau / (tau + g(lam))`` with respect to ``base``."""
        if tau <= 0:
            raise ValueError("tau must be positive")
        return Multiplier(partial(_ssl_multiplier, tau=float(tau), g_inv=self.g_inv),
                          name=f"ssl[{self.kind}](tau={tau:g})")

    def dense(self) -> np.ndarray:
        """Explicit ``P``.  Spectral kinds go through a dense eigensolve."""
        if self.matrix is not None:
            return self.matrix.toarray()
        d = eigendecompose(self.base)
        U = d.eigenvectors
        P = (U * self.g(d.eigenvalues)) @ U.T
        if self.similarity is not None:
            P = self.similarity[:, None] * P / self.similarity[None, :]
        return P


def ssl_kernel(g: WeightedGraph, kind: str, **params) -> SSLKernel:
    """Build one of the supported regularization matrices.

    Parameters
    ----------
    kind : str
        ``laplacian`` (``L**r``), ``normalized`` (``L_norm**r``),
        ``ld_inverse`` (``L D^{-1}``; ``mode="similarity"`` or ``"raw"``),
        ``k_scaling`` (``gamma``), ``diffusion`` (``sigma``),
        ``inverse_cosine`` or ``random_walk`` (``r``, ``sigma >= 2``).

    Powers ``r > 1`` are kept in spectral form so the recurrence only ever
    touches one-hop neighbors; ``matrix`` still carries the explicit power.
    """
    if kind not in KERNEL_KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {KERNEL_KINDS}")
    L = laplacian(g)
    if kind == "laplacian":
        r = _check_power(params.get("r", 1))
        P = _matrix_power(L, r)
        return SSLKernel(kind, L, lambda_max_bound(L, g), partial(_power, r=r), partial(_inv_power, r=r),
                         P, params={"r": r})
    Ln = normalized_laplacian(g)
    if kind == "normalized":
        r = _check_power(params.get("r", 1))
        return SSLKernel(kind, Ln, 2.0, partial(_power, r=r), partial(_inv_power, r=r),
                         _matrix_power(Ln, r), params={"r": r})
    if kind == "ld_inverse":
        mode = params.get("mode", "similarity")
        P = sp.csr_matrix(L @ sp.diags(1.0 / g.degrees))
        P.sort_indices()
        if mode == "similarity":
            return SSLKernel(kind, Ln, 2.0, _identity, _reciprocal, P, similarity=np.sqrt(g.degrees),
                             params={"mode": mode})
        if mode == "raw":
            # same spectrum as L_norm, so the bound 2 still holds
            return SSLKernel(kind, P, 2.0, _identity, _reciprocal, P, params={"mode": mode})
        raise ValueError("mode must be 'similarity' or 'raw'")
    if kind == "k_scaling":
        gamma = float(params.get("gamma", 1.0))
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        s = 1.0 / np.sqrt(gamma + g.degrees)
        S = sp.diags(s)
        P = sp.csr_matrix(S @ (L + gamma * sp.identity(g.node_count)) @ S)
        P.sort_indices()
        # gamma I + L <= 2 (gamma I + D) because D + W is positive semi-definite
        return SSLKernel(kind, P, 2.0, _identity, _reciprocal, P, params={"gamma": gamma})
    if kind == "diffusion":
        sigma = float(params.get("sigma", 1.0))
        s2 = sigma**2
        return SSLKernel(kind, Ln, 2.0, partial(_diffusion, s2=s2), partial(_diffusion_inv, s2=s2),
                         params={"sigma": sigma})
    if kind == "inverse_cosine":
        return SSLKernel(kind, Ln, 2.0, _sec, _cos)
    # random walk
    sigma = float(params.get("sigma", 2.0))
    r = _check_power(params.get("r", 1))
    if sigma < 2:
        raise ValueError("random walk kernel needs sigma >= 2")
    return SSLKernel(kind, Ln, 2.0, partial(_walk, sigma=sigma, r=r), partial(_walk_inv, sigma=sigma, r=r),
                     params={"sigma": sigma, "r": r})


def _check_power(r) -> int:
    if int(r) != r or r < 1:
        raise ValueError("r must be a positive integer")
    return int(r)


def _matrix_power(m: sp.csr_matrix, r: int) -> sp.csr_matrix:
    out = m.copy()
    for _ in range(r - 1):
        out = out @ m
    out = sp.csr_matrix(out)
    out.sort_indices()
    return out


@dataclass
class LabelMatrix:
    """Known labels of a subset of nodes; ``-1`` marks an unlabeled node."""

    classes: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=int)
        if np.any(self.classes < -1) or np.any(self.classes >= self.n_classes):
            raise ValueError("class index out of range")
        if not np.any(self.classes >= 0):
            raise ValueError("need at least one labeled node")

    @classmethod
    def from_pairs(cls, n: int, nodes, labels, n_classes: int | None = None) -> "LabelMatrix":
        nodes = np.asarray(nodes, dtype=int)
        labels = np.asarray(labels, dtype=int)
        if len(np.unique(nodes)) != len(nodes):
            raise ValueError("node labeled twice")
        if np.any((nodes < 0) | (nodes >= n)):
            raise ValueError("node id out of range")
        classes = np.full(n, -1)
        classes[nodes] = labels
        k = int(labels.max()) + 1 if n_classes is None else n_classes
        return cls(classes, k)

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def labeled(self) -> np.ndarray:
        return self.classes >= 0

    @property
    def Y(self) -> np.ndarray:
        """``N x kappa`` indicator matrix."""
        Y = np.zeros((self.n, self.n_classes))
        idx = np.flatnonzero(self.labeled)
        Y[idx, self.classes[idx]] = 1.0
        return Y


def load_labels(path, n: int, n_classes: int | None = None) -> LabelMatrix:
    """Read a ``node_id,class`` CSV (0-based ids)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    nodes = [int(r["node_id"]) for r in rows]
    labels = [int(r["class"]) for r in rows]
    return LabelMatrix.from_pairs(n, nodes, labels, n_classes)


def save_labels(labels: LabelMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "class"])
        for i in np.flatnonzero(labels.labeled):
            w.writerow([int(i), int(labels.classes[i])])


@dataclass
class SSLResult:
    predictions: np.ndarray
    scores: np.ndarray
    messages: dict = field(default_factory=dict)


def ssl_classify(g: WeightedGraph, labels: LabelMatrix, kernel: SSLKernel, tau: float,
                 K: int = 20, audit: bool = False) -> SSLResult:
    """Per-class distributed solves followed by a node-local argmax.

    ``predictions`` holds the argmax for every node (labeled ones included);
    ties go to the lowest class index.
    """
    if labels.n != g.node_count:
        raise ValueError("label matrix does not match graph size")
    approx = chebyshev_coefficients(kernel.multiplier(tau), kernel.lambda_max, K)
    Y = labels.Y
    s = kernel.similarity
    first = Y[:, 0] if s is None else Y[:, 0] / s
    sim = init_network(g, first, approx, operator=kernel.base, audit=audit)
    F = np.empty_like(Y)
    for j in range(labels.n_classes):
        col = Y[:, j] if s is None else Y[:, j] / s
        out, _ = run_forward(sim, col)
        F[:, j] = out if s is None else s * out
    return SSLResult(np.argmax(F, axis=1), F, message_summary(sim.trace))


def ssl_centralized(kernel: SSLKernel, labels: LabelMatrix, tau: float) -> SSLResult:
    """Dense solve of ``(tau I + P) F = tau Y``."""
    P = kernel.dense()
    F = np.linalg.solve(tau * np.eye(kernel.n) + P, tau * labels.Y)
    return SSLResult(np.argmax(F, axis=1), F)
