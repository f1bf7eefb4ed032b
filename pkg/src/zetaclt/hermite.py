"""Physicists' Hermite polynomials and closed-form Gaussian-Hermite integrals.

The rectangle integrals use the boundary-term identity

    sqrt(pi) int_{x1}^{x2} e^{-pi x^2} H_{n+1}(sqrt(pi) x) dx
        = e^{-pi x1^2} H_n(sqrt(pi) x1) - e^{-pi x2^2} H_n(sqrt(pi) x2),

so no quadrature is involved.  Infinite endpoints are allowed; the weighted
boundary term is exactly zero there.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, OrderError, RangeError

MAX_DEGREE = 200
SQRT_PI = math.sqrt(math.pi)


def hermite(n: int, x: float) -> float:
    """H_n(x) by the forward recurrence H_{n+1} = 2x H_n - 2n H_{n-1}."""
    if not 0 <= n <= MAX_DEGREE:
        raise DomainError(f"degree must lie in [0, {MAX_DEGREE}], got {n}")
    h_prev, h = 1.0, 2.0 * x
    if n == 0:
        return 1.0
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    if not math.isfinite(h):
        raise RangeError(f"H_{n}({x}) overflows")
    return h


def hermite_all(n: int, x) -> np.ndarray:
    """H_0 .. H_n at every point of ``x``; shape (n+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 2.0 * x
    for k in range(1, n):
        out[k + 1] = 2.0 * x * out[k] - 2.0 * k * out[k - 1]
    return out


def weighted_hermite(n: int, t: float) -> float:
    """e^{-t^2} H_n(t), computed with rescaling so neither factor over/underflows."""
    if not math.isfinite(t):
        return 0.0
    # log of the running scale factor folded out of (h_prev, h)
    log_scale = -t * t
    h_prev, h = 1.0, 2.0 * t
    if n == 0:
        return math.exp(log_scale)
    for k in range(1, n):
        h_prev, h = h, 2.0 * t * h - 2.0 * k * h_prev
        big = max(abs(h), abs(h_prev))
        if big > 1e150:
            h_prev /= big
            h /= big
            log_scale += math.log(big)
    if h == 0.0:
        return 0.0
    log_mag = log_scale + math.log(abs(h))
    if log_mag > 709:
        raise RangeError(f"e^(-t^2) H_{n}(t) overflows at t={t}")
    return math.copysign(math.exp(log_mag), h)


def gauss_phi(x: float) -> float:
    """int_0^x e^{-pi u^2} du = erf(sqrt(pi) x) / 2."""
    if math.isinf(x):
        return math.copysign(0.5, x)
    return 0.5 * math.erf(SQRT_PI * x)


def _gauss_mass(x1: float, x2: float) -> float:
    # upper tails through erfc to avoid cancellation
    if x1 >= 0:
        return 0.5 * (math.erfc(SQRT_PI * x1) - math.erfc(SQRT_PI * x2)) if math.isfinite(x2) else 0.5 * math.erfc(SQRT_PI * x1)
    if x2 <= 0:
        return _gauss_mass(-x2, -x1)
    return gauss_phi(x2) - gauss_phi(x1)


def hermite_rect_integral(n: int, x1: float, x2: float) -> float:
    """int_{x1}^{x2} e^{-pi x^2} H_n(sqrt(pi) x) dx in closed form."""
    if not 0 <= n <= MAX_DEGREE:
        raise DomainError(f"degree must lie in [0, {MAX_DEGREE}], got {n}")
    if x1 > x2:
        raise OrderError(f"lower endpoint {x1} exceeds upper endpoint {x2}")
    if x1 == x2:
        return 0.0
    if n == 0:
        return _gauss_mass(x1, x2)
    return (weighted_hermite(n - 1, SQRT_PI * x1) - weighted_hermite(n - 1, SQRT_PI * x2)) / SQRT_PI


def hermite_rect_integrals(n_max: int, x1: float, x2: float) -> np.ndarray:
    return np.array([hermite_rect_integral(n, x1, x2) for n in range(n_max + 1)])
