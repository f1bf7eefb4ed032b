"""Prime tables and the prime sums the rest of the package is built on.

``prime_zeta`` evaluates P(s) = sum_p p^-s by Moebius inversion of log zeta
after peeling off the small primes, which makes the inversion series
converge like M^-ns instead of 2^-ns.  ``psi_T`` is the variance scale
sum_p sum_k k^-2 p^-2k sigma_T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError

SEGMENT_THRESHOLD = 10**7
MAX_SIEVE_LIMIT = 10**9
PI_UPPER_CONST = 1.3  # pi(x) <= 1.3 x / log x for x > 1

_EPS = np.finfo(float).eps

# Bernoulli numbers B_2 .. B_10
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66)


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class PrimeSumResult:
    """A prime sum together with a bound on what was left out."""

    value: float
    tail_bound: float
    terms_used: int


def _simple_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit: int, segment: int = 1 << 24) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit) + 1)
    out = [base[base <= limit]]
    low = int(base[-1]) + 1 if len(base) else 2
    while low <= limit:
        high = min(low + segment, limit + 1)
        mask = np.ones(high - low, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            mask[start - low :: p] = False
        out.append(np.flatnonzero(mask).astype(np.int64) + low)
        low = high
    return np.concatenate(out)


def sieve_primes(limit: int) -> PrimeTable:
    """All primes <= ``limit`` in ascending order.

    Plain Eratosthenes up to 10^7, segmented above that.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(f"sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}")
    if limit <= SEGMENT_THRESHOLD:
        primes = _simple_sieve(limit)
    else:
        primes = _segmented_sieve(limit)
    primes.flags.writeable = False
    return PrimeTable(limit, primes)


@lru_cache(maxsize=8)
def cached_primes(limit: int) -> np.ndarray:
    return sieve_primes(limit).primes


def prime_tail_bound(P: float, s: float) -> float:
    """Upper bound for sum_{p > P} p^-s (s > 1) by partial summation."""
    if s <= 1:
        return math.inf
    P = max(float(P), 2.0)
    return PI_UPPER_CONST * s / math.log(P) * P ** (1 - s) / (s - 1)


def direct_prime_sum(s: float, limit: int) -> PrimeSumResult:
    """sum_{p <= limit} p^-s by sieving, with the partial-summation tail."""
    p = cached_primes(int(limit)).astype(float)
    # sum smallest terms first
    value = float(np.sum(np.exp(-s * np.log(p))[::-1]))
    return PrimeSumResult(value, prime_tail_bound(limit, s), len(p))


def _zeta_em(s: float, N: int, start: int) -> float:
    n = np.arange(start, N, dtype=float)
    head = float(np.sum(n[::-1] ** -s))
    tail = N ** (1 - s) / (s - 1) + 0.5 * N**-s
    rising = s
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        # rising = s (s+1) ... (s+2j-2), fact = (2j)!
        tail += b / fact * rising * N ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def zeta_real(s: float, N: int = 50) -> float:
    """zeta(s) for real s > 1 by Euler-Maclaurin through B_10."""
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    return _zeta_em(s, N, 1)


def _mobius(n: int) -> int:
    mu = 1
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            mu = -mu
        d += 1
    return -mu if m > 1 else mu


def _zeta_minus_one(x: float) -> float:
    # zeta(x) - 1 summed from n = 2, so no cancellation against the leading 1
    if x > 40:
        n = np.arange(2, 8, dtype=float)
        return float(np.sum(n[::-1] ** -x))
    return _zeta_em(x, 50, 2)


def _log_zeta_stripped(x: float, small: np.ndarray) -> tuple[float, float]:
    """log(zeta(x) * prod_{p in small} (1 - p^-x)) and the size of the cancelled parts."""
    log_zeta = math.log1p(_zeta_minus_one(x))
    return log_zeta + float(np.sum(np.log1p(-small ** -x))), log_zeta


def prime_zeta(s: float, tol: float = 1e-14, small_limit: int = 100) -> PrimeSumResult:
    """The prime zeta function P(s) = sum_p p^-s for real s > 1.

    Primes up to ``small_limit`` are summed directly; the remainder comes
    from sum_n mu(n)/n log zeta_M(ns), where zeta_M has the Euler factors
    of those primes removed.
    """
    if not s > 1:
        raise DomainError(f"prime zeta diverges for s = {s} <= 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    small = cached_primes(small_limit).astype(float)
    head = float(np.sum((small ** -s)[::-1]))
    M = float(small_limit)
    direct_tail = prime_tail_bound(M, s)
    if direct_tail <= 0.1 * tol:
        return PrimeSumResult(head, direct_tail + 4 * _EPS * head, len(small))

    def stripped_bound(x: float) -> float:
        # sum_{m > M} m^-x, and log(1 + y) <= y
        return (M + 1) ** -x + (M + 1) ** (1 - x) / (x - 1)

    total = 0.0
    n = 1
    rounding = 0.0
    while True:
        mu = _mobius(n)
        if mu:
            term, scale = _log_zeta_stripped(n * s, small)
            total += mu * term / n
            rounding += 16 * _EPS * scale / n
        remainder = sum(stripped_bound(m * s) / m for m in range(n + 1, n + 60))
        if remainder <= 0.05 * tol or n > 400:
            break
        n += 1
    bound = remainder + rounding + 4 * _EPS * abs(head)
    return PrimeSumResult(head + total, float(bound), n)


def sigma_T(theta: float, T: float) -> float:
    return 0.5 + math.log(T) ** -theta


def psi_sigma(sigma: float, tol: float = 1e-14) -> PrimeSumResult:
    """sum_p sum_{k>=1} k^-2 p^-2k sigma via prime zeta values."""
    if not sigma > 0.5:
        raise DomainError(f"psi requires sigma > 1/2, got {sigma}")
    total = 0.0
    bound = 0.0
    k = 1
    while True:
        r = prime_zeta(2 * k * sigma, tol=tol)
        term = r.value / k**2
        total += term
        bound += r.tail_bound / k**2
        if term < 1e-18 * total:
            # remaining k: P(2k sigma) <= 2 * 2^-2k sigma, geometric
            ratio = 2 ** (-2 * sigma)
            bound += 2 * ratio ** (k + 1) / (1 - ratio) / (k + 1) ** 2
            break
        k += 1
    return PrimeSumResult(total, float(bound), k)


def psi_T(theta: float, T: float, tol: float = 1e-14) -> PrimeSumResult:
    """The variance scale psi_T at sigma_T = 1/2 + (log T)^-theta."""
    if not 0 < theta < 0.5:
        raise DomainError(f"theta must lie in (0, 1/2), got {theta}")
    if T < 100:
        raise DomainError(f"T must be >= 100, got {T}")
    return psi_sigma(sigma_T(theta, T), tol=tol)


def psi_direct(sigma: float, limit: int, kmax: int = 60) -> PrimeSumResult:
    """psi at ``sigma`` summed over p <= limit directly, with its tail."""
    p = cached_primes(int(limit)).astype(float)
    logp = np.log(p)
    total = 0.0
    bound = 0.0
    for k in range(1, kmax + 1):
        terms = np.exp(-2 * k * sigma * logp)
        total += float(np.sum(terms[::-1])) / k**2
        bound += prime_tail_bound(limit, 2 * k * sigma) / k**2
        if terms[0] < 1e-20:
            break
    return PrimeSumResult(total, bound, len(p))
