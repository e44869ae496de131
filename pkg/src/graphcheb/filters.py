"""Multipliers used by the applications: heat diffusion, Tikhonov, inverse filtering."""

from __future__ import annotations

from functools import partial

import numpy as np

from .spectral import Multiplier

__all__ = ["heat_multiplier", "tikhonov_multiplier", "inverse_filter_multiplier", "naive_inverse_multiplier"]


def _heat(lam, t):
    return np.exp(-t * np.asarray(lam, dtype=float))


def _tikhonov(lam, tau, r):
    lam = np.asarray(lam, dtype=float)
    return tau / (tau + 2.0 * lam**r)


def heat_multiplier(t: float) -> Multiplier:
    """``g(lam) = exp(-t lam)``."""
    if t < 0:
        raise ValueError("diffusion time must be non-negative")
    return Multiplier(partial(_heat, t=float(t)), name=f"heat(t={t:g})")


def tikhonov_multiplier(tau: float, r: int = 1) -> Multiplier:
    """``g(lam) = tau / (tau + 2 lam**r)``.

    Applying it to ``y`` minimizes ``tau/2 ||f - y||^2 + f^T L^r f``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if r < 1 or int(r) != r:
        raise ValueError("r must be a positive integer")
    return Multiplier(partial(_tikhonov, tau=float(tau), r=int(r)), name=f"tikhonov(tau={tau:g},r={r})")


def _inverse(lam, g_psi, tau, r):
    lam = np.asarray(lam, dtype=float)
    gp = np.asarray(g_psi(lam), dtype=float)
    num = tau * gp
    den = tau * gp**2 + 2.0 * lam**r
    out = np.zeros_like(lam)
    ok = den > 0
    # den == 0 only where lam == 0 and g_psi == 0: that mode is dropped
    out[ok] = num[ok] / den[ok]
    return out


def inverse_filter_multiplier(g_psi, tau: float, r: int = 1) -> Multiplier:
    """Regularized inverse ``tau g / (tau g**2 + 2 lam**r)`` of a blur with multiplier ``g_psi``."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if r < 1 or int(r) != r:
        raise ValueError("r must be a positive integer")
    return Multiplier(partial(_inverse, g_psi=g_psi, tau=float(tau), r=int(r)), name="inverse")


def _naive(lam, g_psi):
    with np.errstate(divide="ignore"):
        return 1.0 / np.asarray(g_psi(np.asarray(lam, dtype=float)), dtype=float)


def naive_inverse_multiplier(g_psi) -> Multiplier:
    """Unregularized ``1 / g_psi``; blows up where the blur is close to zero."""
    return Multiplier(partial(_naive, g_psi=g_psi), name="naive-inverse")
