"""Spectral graph wavelet frames.

The reference design used in this package:

* band-pass kernel ``g``: ``x**2`` below ``x1 = 1``, ``4 / x**2`` above
  ``x2 = 2``, joined by the cubic ``-5 + 11 x - 6 x**2 + x**3`` that matches
  values and slopes at both knots;
* ``J`` scales spaced logarithmically from ``x2 / lambda_min`` down to
  ``x1 / lambda_max``, with ``lambda_min = lambda_max / 20``;
* low-pass ``h(x) = gamma * exp(-(x / (0.6 lambda_min))**4)`` where ``gamma``
  is the peak of ``g`` on ``[x1, x2]``.

The frame is the multiplier union ``(h, g(t_1 .), ..., g(t_J .))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.optimize import minimize_scalar

from .spectral import Multiplier, MultiplierUnion

__all__ = ["WaveletFrame", "abspline_kernel", "sgwt_scales", "sgwt_frame", "frame_bounds"]


def _spline_coefficients(alpha: float, beta: float, x1: float, x2: float) -> np.ndarray:
    M = np.array([
        [1.0, x1, x1**2, x1**3],
        [1.0, x2, x2**2, x2**3],
        [0.0, 1.0, 2 * x1, 3 * x1**2],
        [0.0, 1.0, 2 * x2, 3 * x2**2],
    ])
    v = np.array([1.0, 1.0, alpha / x1, -beta / x2])
    return np.linalg.solve(M, v)


def abspline_kernel(x, alpha: float = 2.0, beta: float = 2.0, x1: float = 1.0, x2: float = 2.0):
    """Band-pass kernel: monic power near zero, power-law decay, cubic in between."""
    x = np.asarray(x, dtype=float)
    a = _spline_coefficients(alpha, beta, x1, x2)
    out = np.empty_like(x)
    low = x < x1
    mid = (x >= x1) & (x < x2)
    high = x >= x2
    out[low] = (x[low] / x1) ** alpha
    xm = x[mid]
    out[mid] = a[0] + a[1] * xm + a[2] * xm**2 + a[3] * xm**3
    out[high] = (x2 / x[high]) ** beta
    return out


def sgwt_scales(lambda_max: float, J: int, lp_factor: float = 20.0,
                x1: float = 1.0, x2: float = 2.0) -> np.ndarray:
    """Decreasing, log-spaced wavelet scales."""
    lmin = lambda_max / lp_factor
    return np.exp(np.linspace(np.log(x2 / lmin), np.log(x1 / lambda_max), J))


def _scaled_kernel(x, t):
    return abspline_kernel(t * np.asarray(x, dtype=float))


def _lowpass(x, gamma, width):
    return gamma * np.exp(-(np.asarray(x, dtype=float) / width) ** 4)


@dataclass(frozen=True)
class WaveletFrame:
    scaling: Multiplier
    scales: np.ndarray
    lambda_max: float
    gamma: float

    @property
    def J(self) -> int:
        return len(self.scales)

    @property
    def eta(self) -> int:
        return self.J + 1

    def kernel(self, x):
        return abspline_kernel(x)

    @property
    def union(self) -> MultiplierUnion:
        wavelets = [Multiplier(partial(_scaled_kernel, t=t), name=f"g(t={t:.4g})") for t in self.scales]
        return MultiplierUnion([self.scaling, *wavelets])


def sgwt_frame(J: int, lambda_max: float, lp_factor: float = 20.0) -> WaveletFrame:
    """Reference wavelet frame with ``J`` scales adapted to ``[0, lambda_max]``."""
    if J < 1:
        raise ValueError("need at least one wavelet scale")
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    scales = sgwt_scales(lambda_max, J, lp_factor)
    res = minimize_scalar(lambda x: -abspline_kernel(np.array([x]))[0], bounds=(1.0, 2.0),
                          method="bounded", options={"xatol": 1e-10})
    gamma = float(-res.fun)
    width = 0.6 * lambda_max / lp_factor
    h = Multiplier(partial(_lowpass, gamma=gamma, width=width), name="h")
    return WaveletFrame(h, scales, float(lambda_max), gamma)


def frame_bounds(frame: WaveletFrame, lam) -> tuple[float, float]:
    """``(min, max)`` of ``sum_j g_j(lam)**2`` over the given spectral points."""
    s = np.sum(frame.union.evaluate(lam) ** 2, axis=0)
    return float(s.min()), float(s.max())
