"""log zeta(sigma + it) on vertical lines, with a continuous branch.

zeta is evaluated by Euler-Maclaurin summation,

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{j=1}^{m} B_2j/(2j)! s(s+1)...(s+2j-2) N^(-s-2j+1) + R,

with |R| <= |s(s+1)...(s+2m+1) B_{2m+2} / (2m+2)!| N^(-sigma-2m-1) / (sigma+2m+1).
The logarithm is continued down from sigma = 3, where the Dirichlet series
log is principal, in steps short enough that no increment can wrap.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _fallback, primes
from .errors import BranchError, DomainError, PoleError, PrecisionError, QualityError
from .randmodel import EmpiricalMeasure

# B_2 .. B_14
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)
SIGMA0 = 3.0
MAX_N = 2 * 10**7
# small cutoffs cost nothing, so never go below this one
MIN_N = 64
MAX_T = 1e8
MAX_EXCLUSION = 0.01


@dataclass(frozen=True)
class ZetaEvalConfig:
    """Settings for zeta and log zeta evaluation.

    ``euler_maclaurin_N`` fixes the direct-sum cutoff; None picks the
    smallest N whose remainder bound meets ``tol`` relative to |zeta|.
    """

    euler_maclaurin_N: int | None = None
    bernoulli_order: int = 12
    sigma_path_step: float = 0.25
    tol: float = 1e-10
    min_step: float = 0.25 / 2**10

    def __post_init__(self):
        o = self.bernoulli_order
        if o < 2 or o % 2 or o > 12:
            raise DomainError(f"bernoulli_order must be even and in [2, 12], got {o}")
        if not 0 < self.sigma_path_step <= 0.25:
            raise DomainError(f"sigma_path_step must lie in (0, 0.25], got {self.sigma_path_step}")
        if self.euler_maclaurin_N is not None and self.euler_maclaurin_N < 1:
            raise DomainError("euler_maclaurin_N must be positive")
        if not 0 < self.tol < 1:
            raise DomainError("tol must lie in (0, 1)")


@dataclass(frozen=True)
class LogZetaSample:
    t: float
    sigma: float
    value: complex
    branch_flags: dict = field(default_factory=dict)


def _pochhammer(s: complex, n: int) -> complex:
    out = 1.0 + 0j
    for i in range(n):
        out *= s + i
    return out


def em_remainder_bound(s: complex, N: int, order: int) -> float:
    """Bound on the Euler-Maclaurin remainder after the B_order term."""
    m = order // 2
    sig = s.real
    poch = abs(_pochhammer(s, 2 * m + 2))
    return poch * abs(_BERNOULLI[m]) / math.factorial(2 * m + 2) * N ** (-sig - 2 * m - 1) / (sig + 2 * m + 1)


def choose_N(s: complex, target: float, order: int) -> int:
    """Smallest N >= 2 with remainder bound <= target (the bound falls with N)."""
    lo, hi = 2, 2
    while em_remainder_bound(s, hi, order) > target:
        hi *= 2
        if hi > 4 * MAX_N:
            raise PrecisionError(f"no N <= {MAX_N} reaches {target:.1e} at s = {s}")
    while lo < hi:
        mid = (lo + hi) // 2
        if em_remainder_bound(s, mid, order) <= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _em_tail(s: complex, N: int, order: int) -> complex:
    out = N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    poch = s
    for j in range(1, order // 2 + 1):
        out += _BERNOULLI[j - 1] / math.factorial(2 * j) * poch * N ** (-s - 2 * j + 1)
        poch *= (s + 2 * j - 1) * (s + 2 * j)
    return out


def _check_s(s: complex) -> None:
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if not s.real > 0:
        raise DomainError(f"need Re(s) > 0, got {s}")
    if abs(s.imag) > MAX_T:
        raise DomainError(f"|Im(s)| must be <= {MAX_T:g}")


def zeta_path(sigmas_lo: float, h: float, nsig: int, t: float, cfg: ZetaEvalConfig = ZetaEvalConfig(), backend=None):
    """zeta(sigma_j + it) for sigma_j = sigmas_lo + j h, j < nsig, from one shared direct sum.

    Returns (values, N, worst relative remainder bound).
    """
    kern = _backend.kernels if backend is None else _backend.get(backend)
    s_lo = complex(sigmas_lo, t)
    for j in (0, nsig - 1):
        _check_s(complex(sigmas_lo + j * h, t))
    order = cfg.bernoulli_order
    N = cfg.euler_maclaurin_N
    target = 0.05 * cfg.tol
    for _ in range(4):
        if cfg.euler_maclaurin_N is None:
            N = max(choose_N(s_lo, target, order), MIN_N)
        if N > MAX_N:
            raise PrecisionError(f"cutoff N = {N} exceeds the supported {MAX_N}")
        direct = kern.dirichlet_multi(t, sigmas_lo, h, nsig, N)
        vals = np.empty(nsig, dtype=complex)
        rel = 0.0
        for j in range(nsig):
            s = complex(sigmas_lo + j * h, t)
            vals[j] = direct[j] + _em_tail(s, N, order)
            rel = max(rel, em_remainder_bound(s, N, order) / max(abs(vals[j]), 1e-300))
        if rel <= cfg.tol:
            return vals, N, rel
        if cfg.euler_maclaurin_N is not None:
            break
        target = 0.5 * cfg.tol * float(np.min(np.abs(vals)))
    raise PrecisionError(f"relative remainder bound {rel:.2e} above tol {cfg.tol:.1e} at t = {t}")


def zeta_em(s: complex, cfg: ZetaEvalConfig = ZetaEvalConfig()) -> complex:
    """zeta(s) by Euler-Maclaurin, relative error within cfg.tol."""
    s = complex(s)
    _check_s(s)
    vals, _, _ = zeta_path(s.real, 0.0, 1, s.imag, cfg)
    return complex(vals[0])


def log_zeta_line(sigma: float, t: float, cfg: ZetaEvalConfig = ZetaEvalConfig()) -> LogZetaSample:
    """Continuous-branch log zeta(sigma + it), continued down from sigma = 3.

    The path sigma = 3 -> sigma is cut into equal steps of at most
    cfg.sigma_path_step; the step is halved until every principal-log
    increment has modulus below 1, and BranchError is raised once it would
    drop below cfg.min_step.
    """
    if not sigma > 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if abs(t) < 2 and sigma <= 1:
        # the path from sigma = 3 would pass next to the pole at s = 1
        raise DomainError(f"need |t| >= 2 when sigma <= 1, got t = {t}")
    if t < 0:
        s = log_zeta_line(sigma, -t, cfg)
        return LogZetaSample(t, sigma, s.value.conjugate(), s.branch_flags)
    if sigma >= SIGMA0:
        z = zeta_em(complex(sigma, t), cfg)
        return LogZetaSample(t, sigma, complex(np.log(z)), {"steps": 0, "halvings": 0})
    span = SIGMA0 - sigma
    steps = math.ceil(span / cfg.sigma_path_step)
    halvings = 0
    while True:
        h = span / steps
        if h < cfg.min_step:
            raise BranchError(f"continuation step fell below {cfg.min_step:g} at t = {t}", t=t)
        vals, N, rel = zeta_path(sigma, h, steps + 1, t, cfg)
        if np.any(vals == 0):
            raise BranchError(f"zeta vanished on the continuation path at t = {t}", t=t)
        incr = np.log(vals[:-1] / vals[1:])
        if np.all(np.abs(incr) < 1.0):
            break
        steps *= 2
        halvings += 1
    start = complex(np.log(vals[-1]))
    # sum from sigma = 3 downwards
    value = start + complex(np.sum(incr[::-1]))
    flags = {
        "steps": steps,
        "halvings": halvings,
        "max_increment": float(np.max(np.abs(incr))),
        "max_imag_increment": float(np.max(np.abs(incr.imag))),
        "N": N,
        "remainder_rel": rel,
    }
    return LogZetaSample(t, sigma, value, flags)


def sample_points(T: float, samples: int, seed: int) -> np.ndarray:
    """t_i uniform in [T, 2T], a pure function of (seed, i)."""
    keys = _fallback.stream_keys(seed, np.arange(samples, dtype=np.uint64))
    return T * (1.0 + _fallback.uniforms(keys, 0))


def _eval_chunk(args):
    sigma, ts, cfg = args
    vals, bad = [], []
    for t in ts:
        try:
            vals.append(log_zeta_line(sigma, float(t), cfg).value)
        except BranchError as exc:
            vals.append(complex("nan"))
            bad.append(exc.t)
    return vals, bad


def empirical_zeta_measure(
    theta: float,
    T: float,
    samples: int,
    seed: int,
    cfg: ZetaEvalConfig = ZetaEvalConfig(),
    workers: int | None = None,
    progress=None,
) -> EmpiricalMeasure:
    """Values of log zeta(sigma_T + it) at ``samples`` seeded points t in [T, 2T].

    Points whose continuation fails are dropped and counted; more than 1%
    dropped raises QualityError.
    """
    if not 0 < theta < 0.5:
        raise DomainError(f"theta must lie in (0, 1/2), got {theta}")
    if not 100 <= T <= 1e7:
        raise DomainError(f"T must lie in [100, 1e7], got {T}")
    if not 1 <= samples <= 10**5:
        raise DomainError(f"samples must lie in [1, 1e5], got {samples}")
    sigma = primes.sigma_T(theta, T)
    ts = sample_points(T, samples, seed)
    workers = workers or default_workers()
    chunk = 64
    jobs = [(sigma, ts[i : i + chunk], cfg) for i in range(0, samples, chunk)]
    out: list = []
    bad: list = []
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            results = ex.map(_eval_chunk, jobs)
            for i, (v, b) in enumerate(results):
                out.extend(v)
                bad.extend(b)
                if progress:
                    progress(min((i + 1) * chunk, samples), samples)
    else:
        for i, job in enumerate(jobs):
            v, b = _eval_chunk(job)
            out.extend(v)
            bad.extend(b)
            if progress:
                progress(min((i + 1) * chunk, samples), samples)
    vals = np.asarray(out, dtype=complex)
    keep = ~np.isnan(vals.real)
    excluded = int(samples - np.count_nonzero(keep))
    head = {
        "source": "zeta-line",
        "theta": theta,
        "T": T,
        "sigma": sigma,
        "requested": samples,
        "excluded_t": [float(t) for t in bad],
    }
    m = EmpiricalMeasure(vals[keep], seed, head, excluded)
    if excluded / samples > MAX_EXCLUSION:
        raise QualityError(f"{excluded} of {samples} samples excluded (> {MAX_EXCLUSION:.0%})")
    return m


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ZETACLT_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


__all__ = [
    "ZetaEvalConfig",
    "LogZetaSample",
    "zeta_em",
    "zeta_path",
    "log_zeta_line",
    "empirical_zeta_measure",
    "em_remainder_bound",
    "choose_N",
    "sample_points",
]
