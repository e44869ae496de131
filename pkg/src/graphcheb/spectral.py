"""Exact spectral reference for graph multiplier operators.

Everything here goes through a dense eigendecomposition and is therefore
limited to moderate graph sizes (see :func:`oracle_cap`).  These routines are
the brute-force ground truth that the Chebyshev approximations are checked
against.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Multiplier",
    "MultiplierUnion",
    "SpectralDecomposition",
    "oracle_cap",
    "eigendecompose",
    "gft",
    "igft",
    "apply_multiplier_exact",
    "apply_union_exact",
    "adjoint_union_exact",
    "operator_matrix",
    "commutes",
]

DEFAULT_ORACLE_CAP = 2000


def oracle_cap() -> int:
    """Largest matrix dimension the dense oracle accepts.

    Overridable through the ``GRAPHCHEB_ORACLE_CAP`` environment variable.
    """
    return int(os.environ.get("GRAPHCHEB_ORACLE_CAP", DEFAULT_ORACLE_CAP))


def _check_cap(n: int) -> None:
    if n > oracle_cap():
        raise ValueError(f"oracle size cap exceeded ({n} > {oracle_cap()})")


@dataclass(frozen=True)
class Multiplier:
    """A real spectral function ``g`` on ``[0, lambda_max]``.

    ``func`` must accept numpy arrays and be evaluated elementwise.
    """

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "g"

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.asarray(self.func(lam), dtype=float) * np.ones_like(lam)


class MultiplierUnion:
    """Ordered stack ``g_1, ..., g_eta`` of multipliers sharing one domain."""

    def __init__(self, multipliers: Sequence[Multiplier] | Multiplier):
        if callable(multipliers):
            multipliers = [multipliers]
        ms = [m if isinstance(m, Multiplier) else Multiplier(m) for m in multipliers]
        if not ms:
            raise ValueError("a multiplier union needs at least one multiplier")
        self.multipliers = tuple(ms)

    @property
    def eta(self) -> int:
        return len(self.multipliers)

    def __len__(self):
        return len(self.multipliers)

    def __iter__(self):
        return iter(self.multipliers)

    def __getitem__(self, j):
        return self.multipliers[j]

    def evaluate(self, lam) -> np.ndarray:
        """Values as an ``(eta, len(lam))`` array."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return np.vstack([m(lam) for m in self.multipliers])


def as_union(u) -> MultiplierUnion:
    return u if isinstance(u, MultiplierUnion) else MultiplierUnion(u)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def to_json(self) -> str:
        """Debug dump; not a stable format."""
        return json.dumps({"eigenvalues": self.eigenvalues.tolist(),
                           "eigenvectors": self.eigenvectors.tolist()})


def eigendecompose(p, sym_tol: float = 1e-12) -> SpectralDecomposition:
    """Dense symmetric eigendecomposition with ascending eigenvalues."""
    P = p.toarray() if sp.issparse(p) else np.asarray(p, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("matrix must be square")
    _check_cap(P.shape[0])
    scale = max(np.abs(P).max(), 1.0)
    if np.abs(P - P.T).max() > sym_tol * scale:
        raise ValueError("matrix not symmetric")
    lam, U = np.linalg.eigh(0.5 * (P + P.T))
    return SpectralDecomposition(lam, U)


def _spectrum(d: SpectralDecomposition) -> np.ndarray:
    # multipliers live on [0, lambda_max]; snap round-off around zero to exactly 0
    lam = d.eigenvalues
    tol = 1e-12 * max(float(np.abs(lam).max(initial=0.0)), 1.0)
    return np.where(lam <= tol, 0.0, lam)


def _check_len(d: SpectralDecomposition, x, n) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != n:
        raise ValueError(f"size mismatch: expected length {n}, got {x.shape[0]}")
    return x


def gft(d: SpectralDecomposition, f) -> np.ndarray:
    f = _check_len(d, f, d.n)
    return d.eigenvectors.T @ f


def igft(d: SpectralDecomposition, fhat) -> np.ndarray:
    fhat = _check_len(d, fhat, d.n)
    return d.eigenvectors @ fhat


def _response(d: SpectralDecomposition, g) -> np.ndarray:
    vals = np.asarray(g(_spectrum(d)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("multiplier singular on spectrum")
    return vals


def apply_multiplier_exact(d: SpectralDecomposition, g, f) -> np.ndarray:
    """``sum_l g(lambda_l) fhat(l) chi_l``."""
    return igft(d, _response(d, g) * gft(d, f))


def apply_union_exact(d: SpectralDecomposition, u, f) -> np.ndarray:
    """Stacked outputs ``[Psi_1 f; ...; Psi_eta f]`` of length ``eta * N``."""
    u = as_union(u)
    fhat = gft(d, f)
    return np.concatenate([igft(d, _response(d, g) * fhat) for g in u])


def adjoint_union_exact(d: SpectralDecomposition, u, a) -> np.ndarray:
    """``sum_j Psi_j a_j`` for a stacked coefficient vector ``a``."""
    u = as_union(u)
    a = _check_len(d, a, u.eta * d.n).reshape(u.eta, d.n)
    out = np.zeros(d.n)
    for g, aj in zip(u, a):
        out += apply_multiplier_exact(d, g, aj)
    return out


def operator_matrix(d: SpectralDecomposition, u) -> np.ndarray:
    """Dense ``(eta N) x N`` matrix of the exact union operator."""
    u = as_union(u)
    _check_cap(d.n)
    U = d.eigenvectors
    return np.vstack([(U * _response(d, g)) @ U.T for g in u])


def commutes(a, b, tol: float = 1e-10) -> bool:
    """True iff ``||AB - BA||_F <= tol ||A||_F ||B||_F``."""
    A = a.toarray() if sp.issparse(a) else np.asarray(a, dtype=float)
    B = b.toarray() if sp.issparse(b) else np.asarray(b, dtype=float)
    if A.shape != B.shape:
        raise ValueError("dimension mismatch")
    comm = np.linalg.norm(A @ B - B @ A)
    return bool(comm <= tol * np.linalg.norm(A) * np.linalg.norm(B))
