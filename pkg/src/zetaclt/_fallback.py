"""Pure-numpy versions of the hot kernels.

Same signatures and the same counter-based random stream as the compiled
``_kernels`` extension; selected by ``_backend`` when the extension is
missing or ``ZETACLT_BACKEND=python``.
"""

from __future__ import annotations

import numpy as np

from . import _arith

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_PRIME_MULT = np.uint64(0xD1B54A32D192ED03)
_PRIME_ADD = np.uint64(0x8CB92BA72F3D8DD7)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    x = np.asarray(x, dtype=np.uint64)
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def stream_keys(seed: int, sample_index: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * _GOLDEN
        return mix64(base + np.asarray(sample_index, dtype=np.uint64))


def uniforms(keys: np.ndarray, prime_index: int) -> np.ndarray:
    """U(sample, prime) in [0, 1), a pure function of (seed, sample, prime)."""
    with np.errstate(over="ignore"):
        c = np.uint64(prime_index) * _PRIME_MULT + _PRIME_ADD
    bits = mix64(keys ^ c)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


def sample_euler(sigma: float, primes: np.ndarray, seed: int, start: int, count: int) -> np.ndarray:
    """log zeta(sigma, X) = -sum_p log(1 - X(p) p^-sigma) for samples start..start+count-1."""
    keys = stream_keys(seed, np.arange(start, start + count, dtype=np.uint64))
    re = np.zeros(count)
    im = np.zeros(count)
    for j, p in enumerate(np.asarray(primes, dtype=float)):
        w = p**-sigma
        theta = _TWO_PI * uniforms(keys, j)
        c = np.cos(theta)
        s = np.sin(theta)
        re -= 0.5 * np.log1p(w * w - 2.0 * w * c)
        im -= np.arctan2(-w * s, 1.0 - w * c)
    return re + 1j * im


def dirichlet_multi(t: float, sigma0: float, h: float, nsig: int, N: int) -> np.ndarray:
    """sum_{n<N} n^-(sigma0 + j h + i t) for j = 0..nsig-1.

    Prime phases come from ``_arith.prime_angles``; composites are filled
    level by level in Omega(n) as products over the smallest prime factor.
    """
    out = np.zeros(nsig, dtype=complex)
    if N <= 1:
        return out
    size = max(int(N), 2)
    spf = _arith.spf_table(size)[:size]
    ang = _arith.prime_angles(t, size)
    ps, _, _ = _arith.prime_logs(size)
    logp = np.log(ps.astype(float))
    ph = np.empty(size, dtype=complex)
    amp = np.empty(size)
    stp = np.empty(size)
    ph[1], amp[1], stp[1] = 1.0, 1.0, 1.0
    ph[ps] = np.exp(-1j * ang[ps])
    amp[ps] = np.exp(-sigma0 * logp)
    stp[ps] = np.exp(-h * logp)
    for idx in _arith.omega_levels(size):
        q = spf[idx]
        m = idx // q
        ph[idx] = ph[q] * ph[m]
        amp[idx] = amp[q] * amp[m]
        stp[idx] = stp[q] * stp[m]
    ph, amp, stp = ph[1:], amp[1:], stp[1:]
    for j in range(nsig):
        out[j] = np.sum(amp * ph)
        amp = amp * stp
    return out


def char_fn_grid(u: np.ndarray, v: np.ndarray, re_nodes: np.ndarray, im_nodes: np.ndarray) -> np.ndarray:
    """mean_m exp(-2i (u Re L_m + v Im L_m)) for every grid point (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.empty(u.shape, dtype=complex)
    chunk = max(1, (1 << 20) // max(len(re_nodes), 1))
    uf, vf, of = u.ravel(), v.ravel(), out.ravel()
    for lo in range(0, len(uf), chunk):
        ph = -2.0 * (np.outer(uf[lo : lo + chunk], re_nodes) + np.outer(vf[lo : lo + chunk], im_nodes))
        of[lo : lo + chunk] = np.mean(np.cos(ph), axis=1) + 1j * np.mean(np.sin(ph), axis=1)
    return of.reshape(u.shape)
