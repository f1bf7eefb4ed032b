"""Truncated formal power series.

Two engines live here:

* ``TruncatedSeries`` -- a univariate series sum_n c_n q^n cut at q^N.  The
  per-prime coefficient functions a_{k,l}(w), b_{k,l}(w) are even in w, so
  they are stored in q = w^2: entry ``n`` is the coefficient of w^(2n).
* ``ConjugateSeries`` -- a bivariate series in z = x + iy and zbar = x - iy,
  truncated at total degree D.  Entries are complex scalars, or (for the
  formal-log route to b_{k,l}) truncated q-series stored along a trailing
  axis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError

DEFAULT_ORDER = 60
DEFAULT_DEGREE = 12


def _conv_trunc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a, b)[: n + 1]


class TruncatedSeries:
    """sum_{n=0}^{N} c_n q^n with exact truncation semantics."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs)
        if c.ndim != 1 or len(c) == 0:
            raise DomainError("coefficients must be a non-empty 1-d array")
        if not np.iscomplexobj(c):
            c = c.astype(float)
        c.flags.writeable = False
        self.coeffs = c

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __repr__(self) -> str:
        return f"TruncatedSeries(order={self.order}, coeffs={self.coeffs[:6]}...)"

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise DomainError("series orders differ")
            return other.coeffs
        out = np.zeros_like(self.coeffs, dtype=np.result_type(self.coeffs, other))
        out[0] = other
        return out

    def __add__(self, other):
        return TruncatedSeries(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return TruncatedSeries(self.coeffs - self._coerce(other))

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return TruncatedSeries(_conv_trunc(self.coeffs, self._coerce(other), self.order))
        return TruncatedSeries(self.coeffs * other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative powers are not supported")
        result = TruncatedSeries(self._coerce(1.0))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exp(self) -> TruncatedSeries:
        """exp of a series with zero constant term, via n g_n = sum j f_j g_{n-j}."""
        f = self.coeffs
        if f[0] != 0:
            raise DomainError("exp needs a zero constant term")
        g = np.zeros_like(f)
        g[0] = 1
        jf = np.arange(len(f)) * f
        for n in range(1, len(f)):
            g[n] = np.dot(jf[1 : n + 1], g[n - 1 :: -1][:n]) / n
        return TruncatedSeries(g)

    def log(self) -> TruncatedSeries:
        """log of a series with constant term 1."""
        g = self.coeffs
        if g[0] != 1:
            raise DomainError("log needs constant term 1")
        f = np.zeros_like(g)
        for n in range(1, len(g)):
            acc = n * g[n]
            if n > 1:
                j = np.arange(1, n)
                acc -= np.dot(j * f[1:n], g[n - 1 : 0 : -1])
            f[n] = acc / n
        return TruncatedSeries(f)

    def __call__(self, q):
        """Evaluate at q by Horner's rule."""
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * q + c
        return acc

    def at_w(self, w):
        """Evaluate a series stored in q = w^2 at w."""
        return self(w * w)


@dataclass(frozen=True)
class BoundParams:
    """Radius r in (0, 1) and the constant C_r = -log(1 - r) / r."""

    r: float

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise DomainError(f"r must lie in (0, 1), got {self.r}")

    @property
    def C_r(self) -> float:
        return -math.log1p(-self.r) / self.r


# -- composition coefficients -------------------------------------------------


@lru_cache(maxsize=None)
def _neglog_power_exact(k: int, N: int) -> tuple[Fraction, ...]:
    base = [Fraction(0)] + [Fraction(1, n) for n in range(1, N + 1)]
    out = [Fraction(1)] + [Fraction(0)] * N
    for _ in range(k):
        out = [sum(out[i] * base[n - i] for i in range(n + 1)) for n in range(N + 1)]
    return tuple(out)


@lru_cache(maxsize=None)
def _neglog_power_float(k: int, N: int) -> np.ndarray:
    base = np.zeros(N + 1)
    base[1:] = 1.0 / np.arange(1, N + 1)
    out = np.zeros(N + 1)
    out[0] = 1.0
    for _ in range(k):
        out = _conv_trunc(out, base, N)
    out.flags.writeable = False
    return out


def neglog_power_coeffs(k: int, N: int, exact: bool = False) -> TruncatedSeries:
    """(-log(1 - z))^k truncated at z^N.

    Coefficient n is the sum over compositions n = n_1 + ... + n_k (n_i >= 1)
    of 1/(n_1 ... n_k).  With ``exact=True`` the coefficients are computed
    in rational arithmetic and rounded once.
    """
    if k < 1 or N < k:
        raise DomainError(f"need k >= 1 and N >= k, got k={k}, N={N}")
    if exact:
        return TruncatedSeries(np.array([float(c) for c in _neglog_power_exact(k, N)]))
    return TruncatedSeries(_neglog_power_float(k, N).copy())


def a_series(k: int, l: int, N: int = DEFAULT_ORDER, exact: bool = False) -> TruncatedSeries:
    """a_{k,l}(w) in q = w^2: coefficient n is c_k(n) c_l(n)."""
    if k < 1 or l < 1 or N < max(k, l):
        raise DomainError(f"need k, l >= 1 and N >= max(k, l), got {k}, {l}, {N}")
    if exact:
        ck, cl = _neglog_power_exact(k, N), _neglog_power_exact(l, N)
        return TruncatedSeries(np.array([float(x * y) for x, y in zip(ck, cl)]))
    return TruncatedSeries(_neglog_power_float(k, N) * _neglog_power_float(l, N))


def compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts < 1 or total < parts:
        return
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def multinomial(n: int, parts) -> float:
    """n! / (p_1! ... p_m!); exact integers up to n = 20, log-gamma beyond."""
    if n <= 20:
        out = math.factorial(n)
        for p in parts:
            out //= math.factorial(p)
        return float(out)
    return math.exp(math.lgamma(n + 1) - sum(math.lgamma(p + 1) for p in parts))


def _multinomial_exact(n: int, parts) -> int:
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def b_series_multinomial(k: int, l: int, N: int = DEFAULT_ORDER, exact: bool = False) -> TruncatedSeries:
    """b_{k,l}(w) from the explicit multinomial sum over products of a-series."""
    if k < 1 or l < 1 or N < max(k, l):
        raise DomainError(f"need k, l >= 1 and N >= max(k, l), got {k}, {l}, {N}")
    if k > l:
        # the formula is symmetric; one evaluation order keeps b_{k,l} == b_{l,k} bitwise
        k, l = l, k
    if exact:
        return TruncatedSeries(np.array([float(c) for c in _b_exact(k, l, N)]))
    total = np.zeros(N + 1)
    for n in range(1, min(k, l) + 1):
        inner = np.zeros(N + 1)
        for ks in compositions(k, n):
            mk = multinomial(k, ks)
            for ls in compositions(l, n):
                prod = None
                for ki, li in zip(ks, ls):
                    a = a_series(ki, li, N).coeffs
                    prod = a if prod is None else _conv_trunc(prod, a, N)
                inner += mk * multinomial(l, ls) * prod
        total += (-1) ** (n - 1) / n * inner
    return TruncatedSeries(total)


@lru_cache(maxsize=None)
def _b_exact(k: int, l: int, N: int) -> tuple[Fraction, ...]:
    def a_ex(ki, li):
        ck, cl = _neglog_power_exact(ki, N), _neglog_power_exact(li, N)
        return [x * y for x, y in zip(ck, cl)]

    def mul(a, b):
        return [sum(a[i] * b[m - i] for i in range(m + 1)) for m in range(N + 1)]

    total = [Fraction(0)] * (N + 1)
    for n in range(1, min(k, l) + 1):
        for ks in compositions(k, n):
            for ls in compositions(l, n):
                prod = None
                for ki, li in zip(ks, ls):
                    a = a_ex(ki, li)
                    prod = a if prod is None else mul(prod, a)
                w = Fraction((-1) ** (n - 1), n) * _multinomial_exact(k, ks) * _multinomial_exact(l, ls)
                total = [t + w * p for t, p in zip(total, prod)]
    return tuple(total)


@lru_cache(maxsize=16)
def _b_log_route_table(D: int, N: int) -> tuple[np.ndarray, float]:
    """All b_{k,l}, k + l <= D, from log J = log(1 + sum i^(k+l)/(k! l!) a_{k,l} z^k zbar^l)."""
    A = np.zeros((D + 1, D + 1, N + 1), dtype=complex)
    A[0, 0, 0] = 1.0
    for k in range(1, D):
        for l in range(1, D + 1 - k):
            if max(k, l) <= N:
                A[k, l] = 1j ** (k + l) / (math.factorial(k) * math.factorial(l)) * a_series(k, l, N).coeffs
    logJ = ConjugateSeries(A, D).log().coeffs
    out = np.zeros((D + 1, D + 1, N + 1))
    residue = 0.0
    for k in range(1, D):
        for l in range(1, D + 1 - k):
            v = logJ[k, l] * math.factorial(k) * math.factorial(l) / 1j ** (k + l)
            scale = max(1.0, float(np.max(np.abs(v))))
            residue = max(residue, float(np.max(np.abs(v.imag))) / scale)
            out[k, l] = v.real
    out.flags.writeable = False
    return out, residue


def b_series_log(k: int, l: int, N: int = DEFAULT_ORDER) -> tuple[TruncatedSeries, float]:
    """b_{k,l}(w) by coefficient extraction from the formal log of J.

    Returns the series and the largest relative imaginary residue seen
    across the table it was extracted from.
    """
    if k < 1 or l < 1 or N < max(k, l):
        raise DomainError(f"need k, l >= 1 and N >= max(k, l), got {k}, {l}, {N}")
    table, residue = _b_log_route_table(k + l, N)
    return TruncatedSeries(table[k, l].copy()), residue


def b_series(k: int, l: int, N: int = DEFAULT_ORDER, route: str = "multinomial") -> TruncatedSeries:
    """b_{k,l}(w) in q = w^2.  ``route`` is "multinomial" or "log"."""
    if route == "multinomial":
        return b_series_multinomial(k, l, N)
    if route == "log":
        return b_series_log(k, l, N)[0]
    raise DomainError(f"unknown route {route!r}")


# -- bivariate series in conjugate coordinates ----------------------------------


def _degree_mask(D: int) -> np.ndarray:
    k, l = np.indices((D + 1, D + 1))
    return (k + l) <= D


class ConjugateSeries:
    """sum_{k+l<=D} c_{k,l} (x+iy)^k (x-iy)^l.

    ``coeffs`` has shape (D+1, D+1) for scalar entries or (D+1, D+1, N+1)
    when every entry is itself a series truncated at q^N.
    """

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs, degree: int | None = None):
        c = np.array(coeffs, dtype=complex)
        if degree is None:
            degree = c.shape[0] - 1
        if c.ndim not in (2, 3) or c.shape[0] != degree + 1 or c.shape[1] != degree + 1:
            raise DomainError(f"coefficient array shape {c.shape} does not match degree {degree}")
        c[~_degree_mask(degree)] = 0
        c.flags.writeable = False
        self.coeffs = c
        self.degree = degree

    @classmethod
    def from_dict(cls, entries: dict, degree: int) -> ConjugateSeries:
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for (k, l), v in entries.items():
            if k + l <= degree:
                c[k, l] = v
        return cls(c, degree)

    @property
    def series_valued(self) -> bool:
        return self.coeffs.ndim == 3

    def __getitem__(self, kl):
        return self.coeffs[kl]

    def _unit(self) -> np.ndarray:
        if self.series_valued:
            e = np.zeros(self.coeffs.shape[2], dtype=complex)
            e[0] = 1
            return e
        return np.complex128(1)

    def _emul(self, a, b):
        if self.series_valued:
            return _conv_trunc(a, b, self.coeffs.shape[2] - 1)
        return a * b

    def __add__(self, other: ConjugateSeries) -> ConjugateSeries:
        return ConjugateSeries(self.coeffs + other.coeffs, self.degree)

    def __sub__(self, other: ConjugateSeries) -> ConjugateSeries:
        return ConjugateSeries(self.coeffs - other.coeffs, self.degree)

    def __mul__(self, other):
        if not isinstance(other, ConjugateSeries):
            return ConjugateSeries(self.coeffs * other, self.degree)
        if other.degree != self.degree or other.coeffs.ndim != self.coeffs.ndim:
            raise DomainError("series shapes differ")
        D = self.degree
        out = np.zeros_like(self.coeffs)
        a, b = self.coeffs, other.coeffs
        for i in range(D + 1):
            for j in range(D + 1 - i):
                if not np.any(a[i, j]):
                    continue
                for k in range(i, D + 1):
                    for l in range(j, D + 1 - k):
                        out[k, l] += self._emul(a[i, j], b[k - i, l - j])
        return ConjugateSeries(out, D)

    __rmul__ = __mul__

    def _weighted_pairs(self, m: int):
        return [(i, j) for i in range(m + 1) for j in range(m + 1 - i) if 0 < i + j]

    def exp(self) -> ConjugateSeries:
        """Truncated exponential; the constant term must vanish.

        Uses the Euler-operator identity E(exp f) = exp(f) E f, i.e.
        m g_{k,l} = sum (i+j) f_{i,j} g_{k-i,l-j} over k + l = m.
        """
        f = self.coeffs
        if np.any(f[0, 0]):
            raise DomainError("exp needs a zero constant term")
        D = self.degree
        g = np.zeros_like(f)
        g[0, 0] = self._unit()
        for m in range(1, D + 1):
            for k in range(m + 1):
                l = m - k
                acc = np.zeros_like(f[0, 0])
                for i in range(k + 1):
                    for j in range(l + 1):
                        if i + j == 0 or not np.any(f[i, j]):
                            continue
                        acc = acc + (i + j) * self._emul(f[i, j], g[k - i, l - j])
                g[k, l] = acc / m
        return ConjugateSeries(g, D)

    def log(self) -> ConjugateSeries:
        """Truncated logarithm of a series whose constant term is 1."""
        g = self.coeffs
        if not np.allclose(g[0, 0], self._unit(), rtol=0, atol=0):
            raise DomainError("log needs constant term 1")
        D = self.degree
        f = np.zeros_like(g)
        for m in range(1, D + 1):
            for k in range(m + 1):
                l = m - k
                acc = m * g[k, l]
                for i in range(k + 1):
                    for j in range(l + 1):
                        if i + j == 0 or (i == k and j == l) or not np.any(f[i, j]):
                            continue
                        acc = acc - (i + j) * self._emul(f[i, j], g[k - i, l - j])
                f[k, l] = acc / m
        return ConjugateSeries(f, D)

    def is_conjugate_symmetric(self, tol: float = 1e-13) -> bool:
        c = self.coeffs
        return bool(np.all(np.abs(c - np.conj(np.swapaxes(c, 0, 1))) <= tol))

    def __call__(self, x, y):
        z, zb = x + 1j * y, x - 1j * y
        acc = 0j
        for k in range(self.degree + 1):
            for l in range(self.degree + 1 - k):
                if self.coeffs[k, l] != 0:
                    acc += self.coeffs[k, l] * z**k * zb**l
        return acc

    def to_xy(self) -> np.ndarray:
        """Coefficients of x^a y^b (complex array, total degree <= D).

        Expands (x+iy)^k (x-iy)^l binomially.
        """
        if self.series_valued:
            raise DomainError("basis change is defined for scalar entries only")
        D = self.degree
        out = np.zeros((D + 1, D + 1), dtype=complex)
        binom = [[math.comb(n, r) for r in range(n + 1)] for n in range(D + 1)]
        for k in range(D + 1):
            for l in range(D + 1 - k):
                c = self.coeffs[k, l]
                if c == 0:
                    continue
                for r in range(k + 1):
                    cr = c * binom[k][r] * 1j**r
                    for s in range(l + 1):
                        out[k + l - r - s, r + s] += cr * binom[l][s] * (-1j) ** s
        return out


def conj_exp(s: ConjugateSeries) -> ConjugateSeries:
    return s.exp()


def conj_log(s: ConjugateSeries) -> ConjugateSeries:
    return s.log()


def golden_rows(kmax: int, N: int, families=("a", "b"), exact: bool = False) -> list[dict]:
    """Flat rows {family, k, l, n, value}: the coefficient of w^(2n) in a_{k,l} or b_{k,l}."""
    rows = []
    for fam in families:
        if fam not in ("a", "b"):
            raise DomainError(f"golden tables cover families a and b, got {fam!r}")
        for k in range(1, kmax + 1):
            for l in range(1, kmax + 1):
                s = a_series(k, l, N, exact) if fam == "a" else b_series_multinomial(k, l, N, exact)
                for n, v in enumerate(s.coeffs):
                    if v != 0.0:
                        rows.append({"family": fam, "k": k, "l": l, "n": n, "value": float(v)})
    return rows


def write_golden(path, kmax: int, N: int, families=("a", "b"), exact: bool = True) -> int:
    """Write golden_rows as a JSON array; returns the row count."""
    import json

    rows = golden_rows(kmax, N, families, exact)
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=0)
    return len(rows)
