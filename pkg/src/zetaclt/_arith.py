"""Arithmetic tables shared by both kernel backends.

The Dirichlet sums need n^{-it} for t up to 10^7.  Forming t log n in
double precision loses about t * log n * 2^-53 ~ 4e-9 of phase, which is
far above the 1e-10 target.  Here only the prime phases are formed, in
double-double: log p is held as hi + lo (computed once with mpmath),
t * hi is split exactly with Dekker's product, and the reduction modulo 2 pi
uses a two-word 2 pi.  Composite phases are then products of unit complex
numbers, which costs only a few ulps per prime factor.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

_SPLIT = 134217729.0  # 2^27 + 1
TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16

_cache: dict = {"spf": np.zeros(2, dtype=np.int32), "log_n": 1, "log": (np.zeros(0), np.zeros(0), np.zeros(0, np.int64))}


def spf_table(N: int) -> np.ndarray:
    """Smallest prime factor of every n < N (0 and 1 map to 0); grows a shared cache."""
    spf = _cache["spf"]
    if spf.shape[0] >= N:
        return spf
    size = max(int(N), 2 * spf.shape[0])
    arr = np.zeros(size, dtype=np.int32)
    for q in range(2, math.isqrt(size - 1) + 1):
        if arr[q] == 0:
            blk = arr[q * q :: q]
            blk[blk == 0] = q
    idx = np.flatnonzero(arr == 0)
    arr[idx] = idx
    arr[:2] = 0
    _cache["spf"] = arr
    _cache.pop("levels", None)
    return arr


def prime_logs(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(primes < N, hi, lo) with hi + lo = log p to about 2^-106 relative."""
    ps, hi, lo = _cache["log"]
    if _cache["log_n"] >= N:
        k = int(np.searchsorted(ps, N))
        return ps[:k], hi[:k], lo[:k]
    size = max(int(N), 2 * _cache["log_n"])
    spf = spf_table(size)
    new = np.flatnonzero(spf[: size] == np.arange(size))
    new = new[new >= 2]
    start = len(ps)
    h2 = np.empty(len(new))
    l2 = np.empty(len(new))
    h2[:start] = hi
    l2[:start] = lo
    with mpmath.workprec(120):
        for i in range(start, len(new)):
            x = mpmath.log(int(new[i]))
            h = float(x)
            h2[i] = h
            l2[i] = float(x - h)
    _cache["log"] = (new.astype(np.int64), h2, l2)
    _cache["log_n"] = size
    return prime_logs(N)


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b) -> tuple[np.ndarray, np.ndarray]:
    """p + e = a * b exactly (Dekker)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def reduce_angle(t: float, hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """t * (hi + lo) reduced into [-pi, pi], accurate to a few ulps of pi."""
    P, e = two_prod(t, hi)
    e = e + t * lo
    k = np.rint(P / TWO_PI_HI)
    Q, f = two_prod(k, TWO_PI_HI)
    r = (P - Q) - f
    r = r - k * TWO_PI_LO + e
    # k may be off by one when P sits near an odd multiple of pi
    return r - TWO_PI_HI * np.rint(r / TWO_PI_HI)


def prime_angles(t: float, N: int) -> np.ndarray:
    """Array of length max(N, 2) holding t log p mod 2 pi at every prime p < N (0 elsewhere)."""
    out = np.zeros(max(int(N), 2))
    ps, hi, lo = prime_logs(N)
    out[ps] = reduce_angle(float(t), hi, lo)
    return out


def omega_levels(N: int) -> list[np.ndarray]:
    """Composite indices 4 <= n < N grouped by Omega(n) (2, 3, ...), for vectorized product building."""
    lv = _cache.get("levels")
    spf = spf_table(N)
    if lv is None or lv[0] < N:
        size = spf.shape[0]
        n = np.arange(size)
        om = np.zeros(size, dtype=np.int8)
        cof = np.zeros(size, dtype=np.int64)
        cof[2:] = n[2:] // spf[2:]
        # Omega(n) = Omega(n / spf(n)) + 1 and the cofactor is smaller, so one ascending pass suffices
        # (done in blocks: within [b, 2b) all cofactors are < b)
        om[2:4] = 1
        b = 4
        while b < size:
            hi = min(2 * b, size)
            om[b:hi] = om[cof[b:hi]] + 1
            b = hi
        groups = [np.flatnonzero(om == k) for k in range(2, int(om.max()) + 1)]
        lv = (size, om, groups)
        _cache["levels"] = lv
    _, om, groups = lv
    return [g[g < N] for g in groups]
