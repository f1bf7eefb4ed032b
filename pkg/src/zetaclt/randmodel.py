"""The random Euler product zeta(sigma, X) = prod_p (1 - X(p) p^-sigma)^-1.

Monte-Carlo sampling of log zeta(sigma, X), the per-prime characteristic
function

    J(u, v, w) = E exp(-2i (u Re log(1 - wX) + v Im log(1 - wX))),

its product over primes, and density recovery by 2-d Fourier inversion.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _backend, primes
from .coeffs import ExpansionParams, b_tilde_table
from .density import Rectangle
from .errors import BranchError, DomainError, PrecisionError
from .series import a_series

DEFAULT_SEED = 20240611
MIN_NODES = 64
MAX_NODES = 1 << 16
J_TOL = 1e-12
CUTOFF = 1e-12


@dataclass(frozen=True)
class RandomEulerConfig:
    sigma: float
    prime_limit: int
    sample_count: int
    seed: int = DEFAULT_SEED
    tail_budget: float | None = None

    def __post_init__(self):
        if not self.sigma > 0.5:
            raise DomainError(f"the random Euler product diverges for sigma = {self.sigma} <= 1/2")
        if self.sigma > 1:
            raise DomainError(f"sigma must lie in (1/2, 1], got {self.sigma}")
        if self.prime_limit < 0 or self.sample_count < 0:
            raise DomainError("prime_limit and sample_count must be non-negative")
        if self.tail_budget is not None:
            var = primes.prime_tail_bound(max(self.prime_limit, 2), 2 * self.sigma)
            if var > self.tail_budget:
                raise DomainError(f"omitted variance bound {var:.3e} exceeds budget {self.tail_budget:.3e}")

    def header(self) -> dict:
        return {
            "sigma": self.sigma,
            "prime_limit": self.prime_limit,
            "count": self.sample_count,
            "seed": self.seed,
        }


@dataclass
class EmpiricalMeasure:
    """A cloud of complex samples of log zeta with rectangle counting."""

    samples: np.ndarray
    seed: int
    header: dict = field(default_factory=dict)
    excluded: int = 0

    @property
    def count(self) -> int:
        return len(self.samples)

    def rect_probability(self, rect: Rectangle, psi: float) -> tuple[float, float]:
        return empirical_rect_probability(self, rect, psi)

    def mean(self) -> tuple[complex, complex]:
        """Sample mean and its per-coordinate standard error (as re + i im)."""
        s = self.samples
        se = complex(np.std(s.real, ddof=1), np.std(s.imag, ddof=1)) / math.sqrt(len(s))
        return complex(np.mean(s)), se

    def save(self, path: str, fmt: str = "csv") -> None:
        """Write samples as CSV (re,im) or raw little-endian float64 pairs, plus ``path.json``."""
        head = dict(self.header)
        head.update({"count": self.count, "seed": self.seed, "excluded": self.excluded, "format": fmt})
        if fmt == "csv":
            with open(path, "w") as fh:
                fh.write("re,im\n")
                for z in self.samples:
                    fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        elif fmt == "bin":
            np.column_stack([self.samples.real, self.samples.imag]).astype("<f8").tofile(path)
        else:
            raise DomainError(f"unknown format {fmt!r}")
        with open(path + ".json", "w") as fh:
            json.dump(head, fh, indent=1)

    @classmethod
    def load(cls, path: str) -> EmpiricalMeasure:
        with open(path + ".json") as fh:
            head = json.load(fh)
        if head.get("format", "csv") == "bin":
            pairs = np.fromfile(path, dtype="<f8").reshape(-1, 2)
        else:
            pairs = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        samples = pairs[:, 0] + 1j * pairs[:, 1]
        seed = head.pop("seed")
        excluded = head.pop("excluded", 0)
        head.pop("format", None)
        return cls(samples, seed, head, excluded)


def sample_log_zeta_random(cfg: RandomEulerConfig, chunk: int = 1 << 16, backend: str | None = None) -> EmpiricalMeasure:
    """Draw cfg.sample_count values of log zeta(sigma, X) over primes <= prime_limit.

    X(p) = exp(2 pi i U) where U is a hash of (seed, sample index, prime
    index), so every sample is reproducible on its own and chunking or
    ordering never changes the result.
    """
    kern = _backend.kernels if backend is None else _backend.get(backend)
    if cfg.prime_limit < 2 or cfg.sample_count == 0:
        samples = np.zeros(cfg.sample_count, dtype=complex)
    else:
        ps = primes.cached_primes(int(cfg.prime_limit))
        parts = [
            kern.sample_euler(cfg.sigma, ps, cfg.seed, lo, min(chunk, cfg.sample_count - lo))
            for lo in range(0, cfg.sample_count, chunk)
        ]
        samples = np.concatenate(parts)
    head = cfg.header()
    head["source"] = "random-model"
    head["tail_std"] = omitted_tail_std(cfg.sigma, cfg.prime_limit)
    return EmpiricalMeasure(samples, cfg.seed, head)


def omitted_tail_std(sigma: float, prime_limit: int) -> float:
    """sqrt(sum_{p > P} b_{1,1}(p^-sigma)): the spread of the omitted factors."""
    full = primes.psi_sigma(sigma).value
    if prime_limit < 2:
        return math.sqrt(full)
    head = primes.psi_direct(sigma, int(prime_limit)).value
    return math.sqrt(max(full - head, 0.0))


def empirical_rect_probability(m: EmpiricalMeasure, rect: Rectangle, psi: float) -> tuple[float, float]:
    """Fraction of samples whose sqrt(pi psi)-normalized value lies in ``rect``."""
    if m.count == 0:
        raise DomainError("empty measure")
    if psi <= 0:
        raise DomainError("psi must be positive")
    if rect.degenerate:
        return 0.0, 0.0
    z = m.samples / math.sqrt(math.pi * psi)
    p = float(np.count_nonzero(rect.contains(z.real, z.imag))) / m.count
    return p, math.sqrt(p * (1 - p) / m.count)


def tail_rect_budget(tail_std: float, psi: float) -> float:
    """Bound on how much the omitted factors can move a rectangle probability.

    The omitted sum B is centred with E|B|^2 = tail_std^2, so to second
    order the shift is (1/2) E|B|^2 sup|second derivative of the mass|.  In
    the normalized plane that derivative is at most 4 sqrt(2 pi / e) times
    the Gaussian peak; a factor 2 covers the non-Gaussian part.
    """
    s2 = tail_std**2 / (math.pi * psi)
    return 2.0 * 0.5 * s2 * 4.0 * math.sqrt(2 * math.pi / math.e)


# -- characteristic function ---------------------------------------------------


def _factor_logs(w: float, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Re and Im of log(1 - w e^{i theta}) at M equispaced angles."""
    theta = 2 * np.pi * np.arange(M) / M
    c, s = np.cos(theta), np.sin(theta)
    return 0.5 * np.log1p(w * w - 2 * w * c), np.arctan2(-w * s, 1 - w * c)


def J_quadrature(u: float, v: float, w: float, nodes: int = MIN_NODES) -> complex:
    """J(u, v, w) by the trapezoidal rule on the circle, doubling nodes to 1e-12."""
    if not 0 <= w < 1:
        raise DomainError(f"J needs 0 <= w < 1, got {w}")
    if nodes < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} nodes")
    prev = None
    M = nodes
    while M <= MAX_NODES:
        re, im = _factor_logs(w, M)
        val = complex(np.mean(np.exp(-2j * (u * re + v * im))))
        if prev is not None and abs(val - prev) < J_TOL:
            return val
        prev = val
        M *= 2
    raise PrecisionError(f"J({u}, {v}, {w}) did not settle within {MAX_NODES} nodes")


def J_series(u: float, v: float, w: float, D: int = 16, N: int = 60) -> tuple[complex, float]:
    """1 + sum_{k,l>=1, k+l<=D} i^(k+l)/(k! l!) a_{k,l}(w) (u+iv)^k (u-iv)^l, with a tail bound."""
    if not 0 <= w < 1:
        raise DomainError(f"J needs 0 <= w < 1, got {w}")
    z, zb = complex(u, v), complex(u, -v)
    total = 1.0 + 0j
    for k in range(1, D):
        for l in range(1, D + 1 - k):
            a = a_series(k, l, N).at_w(w)
            total += 1j ** (k + l) / (math.factorial(k) * math.factorial(l)) * a * z**k * zb**l
    # a_{k,l}(w) <= (C_w w)^(k+l), and sum_{k+l=m} 1/(k! l!) = 2^m / m!
    if w == 0:
        return total, 0.0
    x = 2 * (-math.log1p(-w)) * abs(z)
    tail = sum(x**m / math.factorial(m) for m in range(D + 1, D + 40))
    # truncation of each a-series at w^(2N)
    tail += (D * D) * w ** (2 * N + 2) / (1 - w * w) * math.exp(x)
    return total, tail


def log_J_vs_expansion(u: float, v: float, sigma: float, prime_limit: int, D: int) -> float:
    """|sum_p log J(pi u, pi v, p^-sigma) - expansion| for the degree-D prime-summed expansion.

    The left side runs the quadrature over p <= prime_limit and adds the
    Gaussian term of the omitted primes; the right side is
    -pi^2 (u^2+v^2) psi + sum_{3<=k+l<=D} b_tilde_{k,l} (u+iv)^k (u-iv)^l.
    """
    if u == 0 and v == 0:
        return 0.0
    ps = primes.cached_primes(int(prime_limit)).astype(float)
    lhs = 0j
    for p in ps:
        J = J_quadrature(math.pi * u, math.pi * v, p**-sigma)
        if J.real <= 0:
            raise BranchError(f"J factor at p={int(p)} left the principal half-plane")
        lhs += np.log(J)
    psi = primes.psi_sigma(sigma).value
    tail11 = psi - primes.psi_direct(sigma, int(prime_limit)).value
    r2 = u * u + v * v
    lhs += -math.pi**2 * r2 * tail11
    rhs = -math.pi**2 * r2 * psi
    if D >= 3:
        bt = b_tilde_table(D)
        z, zb = complex(u, v), complex(u, -v)
        for (k, l), b in bt.entries.items():
            rhs += b * z**k * zb**l
    return abs(lhs - rhs)


# -- Fourier inversion ---------------------------------------------------------


@dataclass(frozen=True)
class FourierGrid:
    """Trapezoidal grid for the inversion integral.

    ``step`` is the spacing in (u, v).  ``radius`` (if given) must reach both
    the point where the Gaussian majorant exp(-pi^2 psi r^2) falls below
    ``cutoff`` and the point where |hat Phi| itself does; left as None it is
    found by scanning rings outward.  ``prime_limit`` bounds the primes
    multiplied exactly; the rest enter through their Gaussian factor.
    """

    step: float = 0.1
    radius: float | None = None
    cutoff: float = CUTOFF
    prime_limit: int = 10**4
    ring_step: float = 0.5


def required_radius(psi: float, cutoff: float = CUTOFF) -> float:
    """Radius where the Gaussian majorant exp(-pi^2 psi r^2) reaches ``cutoff``."""
    return math.sqrt(-math.log(cutoff) / (math.pi**2 * psi))


RING_POINTS = 64
MAX_RADIUS = 60.0


def phi_rand(u, v, sigma: float, prime_limit: int = 10**4, backend: str | None = None) -> np.ndarray:
    """hat Phi_rand at arbitrary points: exact factors for p <= prime_limit, Gaussian tail beyond."""
    kern = _backend.kernels if backend is None else _backend.get(backend)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    u, v = (a.ravel() for a in np.broadcast_arrays(u, v))
    r = float(np.max(np.hypot(u, v))) if len(u) else 0.0
    ring = r * np.exp(2j * np.pi * np.arange(16) / 16)
    phi = np.ones(len(u), dtype=complex)
    for p in primes.cached_primes(int(prime_limit)).astype(float) if prime_limit >= 2 else []:
        w = p**-sigma
        M = _nodes_for(kern, w, math.pi * ring.real, math.pi * ring.imag)
        re, im = _factor_logs(w, M)
        phi *= kern.char_fn_grid(math.pi * u, math.pi * v, re, im)
    phi *= np.exp(-(math.pi**2) * (u * u + v * v) * _tail11(sigma, prime_limit))
    return phi


def _tail11(sigma: float, prime_limit: int) -> float:
    full = primes.psi_sigma(sigma).value
    if prime_limit < 2:
        return full
    return max(full - primes.psi_direct(sigma, int(prime_limit)).value, 0.0)


def decay_radius(sigma: float, psi: float, grid: FourierGrid = FourierGrid()) -> float:
    """Smallest scanned radius beyond which |hat Phi| stays below the cutoff.

    |hat Phi| is not monotone along rays, so two consecutive rings must both
    be below the cutoff.
    """
    ang = np.exp(2j * np.pi * np.arange(RING_POINTS) / RING_POINTS)
    r = required_radius(psi, grid.cutoff)
    below = 0
    while r <= MAX_RADIUS:
        z = r * ang
        if np.max(np.abs(phi_rand(z.real, z.imag, sigma, grid.prime_limit))) < grid.cutoff:
            below += 1
            if below == 2:
                return r - grid.ring_step
        else:
            below = 0
        r += grid.ring_step
    raise PrecisionError(f"characteristic function still above {grid.cutoff} at radius {MAX_RADIUS}")


class CharacteristicGrid:
    """hat Phi_rand(u, v) = prod_p J(pi u, pi v, p^-sigma) tabulated on a disk."""

    def __init__(self, sigma: float, psi: float, grid: FourierGrid = FourierGrid(), backend: str | None = None):
        R = required_radius(psi, grid.cutoff)
        if grid.radius is not None:
            if grid.radius < R:
                raise PrecisionError(f"grid radius {grid.radius} too small; need at least {R:.6f}")
            R = grid.radius
        else:
            R = decay_radius(sigma, psi, grid)
        self.sigma, self.psi, self.grid = sigma, psi, grid
        h = grid.step
        n = int(math.ceil(R / h))
        ax = h * np.arange(-n, n + 1)
        U, V = np.meshgrid(ax, ax, indexing="ij")
        disk = U * U + V * V <= R * R
        self.u, self.v = U[disk], V[disk]
        self.phi = phi_rand(self.u, self.v, sigma, grid.prime_limit, backend)
        self.radius = R

    def at(self, u: float, v: float) -> complex:
        """Tabulated value at the grid node nearest to (u, v)."""
        i = int(np.argmin((self.u - u) ** 2 + (self.v - v) ** 2))
        return complex(self.phi[i])

    def hermitian_defect(self) -> float:
        """max |hat Phi(-u, -v) - conj hat Phi(u, v)| over the grid."""
        key = {(round(a / self.grid.step), round(b / self.grid.step)): i for i, (a, b) in enumerate(zip(self.u, self.v))}
        worst = 0.0
        for (a, b), i in key.items():
            j = key[(-a, -b)]
            worst = max(worst, abs(self.phi[j] - np.conj(self.phi[i])))
        return worst

    def _sum(self, x: float, y: float) -> complex:
        ph = np.exp(-2j * np.pi * (self.u * x + self.v * y))
        return complex(np.sum(self.phi * ph)) * self.grid.step**2

    def density(self, x, y) -> np.ndarray:
        """F(x, y) = iint hat Phi(u, v) e^{-2 pi i (ux + vy)} du dv (real part)."""
        x, y = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)), np.atleast_1d(np.asarray(y, dtype=float)))
        out = np.empty(x.shape)
        for idx in np.ndindex(x.shape):
            out[idx] = self._sum(x[idx], y[idx]).real
        return out

    def imag_residue(self, x: float, y: float) -> float:
        """|Im| of the inversion sum; zero up to rounding for a Hermitian hat Phi."""
        return abs(self._sum(x, y).imag)

    def box_mass(self, half_width: float) -> float:
        """Oracle mass of [-w, w]^2, integrating the inversion kernel exactly in x and y."""

        def kernel(t):
            safe = np.where(t == 0, 1.0, t)
            return np.where(t == 0, 2 * half_width, np.sin(2 * np.pi * t * half_width) / (np.pi * safe))

        return float(np.sum(self.phi * kernel(self.u) * kernel(self.v)).real) * self.grid.step**2


def _nodes_for(kern, w: float, u: np.ndarray, v: np.ndarray) -> int:
    M = MIN_NODES
    prev = None
    while M <= MAX_NODES:
        re, im = _factor_logs(w, M)
        val = kern.char_fn_grid(u, v, re, im)
        if prev is not None and np.max(np.abs(val - prev)) < 1e-13:
            return M // 2
        prev = val
        M *= 2
    raise PrecisionError(f"trapezoid for w={w} did not settle")


_grid_cache: dict = {}


def characteristic_grid(sigma: float, psi: float, grid: FourierGrid = FourierGrid()) -> CharacteristicGrid:
    key = (sigma, psi, grid)
    if key not in _grid_cache:
        _grid_cache[key] = CharacteristicGrid(sigma, psi, grid)
    return _grid_cache[key]


def fourier_invert_density(params: ExpansionParams, x, y, grid: FourierGrid = FourierGrid()):
    """Density of log zeta(sigma_T, X) at (x, y) by direct Fourier inversion."""
    cg = characteristic_grid(params.sigma_T, params.psi, grid)
    out = cg.density(x, y)
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    ys = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    res = max(cg.imag_residue(a, b) for a, b in zip(*np.broadcast_arrays(xs, ys)))
    if res > 1e-10:
        raise PrecisionError(f"inversion imaginary residue {res:.2e} exceeds 1e-10")
    return out if np.ndim(x) or np.ndim(y) else float(out[0])


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ZETACLT_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return os.cpu_count() or 1
