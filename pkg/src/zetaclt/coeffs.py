"""Prime-summed coefficient tables: b_tilde, b_prime and the final d table.

Sums over primes of b_{k,l}(p^-1/2) converge slowly, so they are never
formed prime by prime for the production table.  Instead b_{k,l} is
expanded as sum_n beta_n w^(2n) and

    sum_p b_{k,l}(p^-sigma) = sum_n beta_n P(2 n sigma)

with P the prime zeta function.  The direct sieve sum is kept as a
cross-check only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import primes
from .errors import DomainError, PrecisionError
from .series import DEFAULT_ORDER, BoundParams, ConjugateSeries, b_series

FAMILIES = ("a", "b", "b_tilde", "b_prime", "d")

# sup of admissible delta_3 in the decay estimate for d_{k,l}
DELTA3_SUP = math.sqrt(2) / (math.e * BoundParams(1 / math.sqrt(2)).C_r)
DEFAULT_DELTA3 = math.nextafter(DELTA3_SUP, 0.0)

REALNESS_TOL = 1e-13


@dataclass(frozen=True)
class ExpansionParams:
    theta: float
    T: float
    sigma_T: float
    psi: float
    degree: int = 8
    prime_limit: int = 10**7
    psi_tail_bound: float = 0.0

    @classmethod
    def build(cls, theta: float, T: float, degree: int = 8, prime_limit: int = 10**7) -> ExpansionParams:
        if not 0 < theta < 0.5:
            raise DomainError(f"theta must lie in (0, 1/2), got {theta}")
        if T < 100:
            raise DomainError(f"T must be >= 100, got {T}")
        if degree < 0:
            raise DomainError("degree must be >= 0")
        s = primes.sigma_T(theta, T)
        if not 0.5 < s < 1:
            raise DomainError(f"sigma_T = {s} outside (1/2, 1)")
        psi = primes.psi_T(theta, T)
        return cls(theta, T, s, psi.value, degree, prime_limit, psi.tail_bound)

    @classmethod
    def from_psi(cls, psi: float, degree: int = 8, sigma: float = 0.75) -> ExpansionParams:
        """Parameters with a prescribed psi (for tests of the formulas alone)."""
        if psi <= 0:
            raise DomainError("psi must be positive")
        return cls(float("nan"), float("nan"), sigma, psi, degree, 0)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "T": self.T,
            "sigma_T": self.sigma_T,
            "psi": self.psi,
            "degree": self.degree,
            "prime_limit": self.prime_limit,
        }


@dataclass(frozen=True)
class CoeffTable:
    """(k, l) -> coefficient for one family, with truncation metadata."""

    family: str
    degree: int
    entries: dict
    tail_bound: float = 0.0
    prime_limit: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        for v in self.entries.values():
            if not np.isfinite(v):
                raise PrecisionError(f"non-finite entry in {self.family} table")

    def __getitem__(self, kl) -> float:
        return self.entries.get(tuple(kl), 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return (
            self.family == other.family
            and self.degree == other.degree
            and self.prime_limit == other.prime_limit
            and self.tail_bound == other.tail_bound
            and self.entries == other.entries
        )

    def as_array(self) -> np.ndarray:
        dtype = complex if any(isinstance(v, complex) for v in self.entries.values()) else float
        out = np.zeros((self.degree + 1, self.degree + 1), dtype=dtype)
        for (k, l), v in self.entries.items():
            out[k, l] = v
        return out

    def to_json(self) -> str:
        rows = []
        for (k, l), v in sorted(self.entries.items()):
            if isinstance(v, complex):
                rows.append({"k": k, "l": l, "value": {"re": v.real, "im": v.imag}})
            else:
                rows.append({"k": k, "l": l, "value": float(v)})
        doc = {
            "family": self.family,
            "degree": self.degree,
            "prime_limit": self.prime_limit,
            "entries": rows,
            "tail_bound": self.tail_bound,
        }
        if self.params:
            doc["params"] = self.params
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> CoeffTable:
        doc = json.loads(text)
        entries = {}
        for row in doc["entries"]:
            v = row["value"]
            entries[(int(row["k"]), int(row["l"]))] = complex(v["re"], v["im"]) if isinstance(v, dict) else v
        return cls(
            family=doc["family"],
            degree=int(doc["degree"]),
            entries=entries,
            tail_bound=doc.get("tail_bound", 0.0),
            prime_limit=doc.get("prime_limit"),
            params=doc.get("params", {}),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> CoeffTable:
        with open(path) as fh:
            return cls.from_json(fh.read())


def _exponent_pairs(D: int):
    for m in range(3, D + 1):
        for k in range(1, m):
            yield k, m - k


def _series_tail(terms: np.ndarray) -> float:
    """Geometric extrapolation of sum_{n > N} |t_n| from the last terms.

    The decay rate is read off the running-max envelope of the final dozen
    terms, so isolated sign changes near zero do not fake a slow decay.
    """
    t = np.abs(np.asarray(terms, dtype=float))
    if not np.any(t):
        return 0.0
    window = min(len(t), 12)
    env = np.maximum.accumulate(t[::-1])[::-1][-window:]
    if window < 4 or env[0] == 0:
        return 2.0 * float(env[-1])
    if env[-1] == 0:
        return 0.0
    rho = float((env[-1] / env[0]) ** (1.0 / (window - 1)))
    if rho >= 0.95:
        return math.inf
    return 2.0 * float(env[-1]) * rho / (1 - rho)


@lru_cache(maxsize=64)
def _prime_zeta_values(sigma: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    vals = np.zeros(N + 1)
    tails = np.zeros(N + 1)
    for n in range(1, N + 1):
        if 2 * n * sigma <= 1:
            vals[n] = math.nan
            continue
        r = primes.prime_zeta(2 * n * sigma, tol=1e-15)
        vals[n], tails[n] = r.value, r.tail_bound
    return vals, tails


def prime_summed_b(k: int, l: int, sigma: float = 0.5, N: int = DEFAULT_ORDER) -> primes.PrimeSumResult:
    """sum_p b_{k,l}(p^-sigma) through prime zeta values.

    Needs max(k, l) * 2 sigma > 1 so that every P(2 n sigma) converges.
    """
    if 2 * max(k, l) * sigma <= 1:
        raise DomainError(f"sum over primes of b_{k},{l}(p^-{sigma}) diverges")
    beta = b_series(k, l, N).coeffs
    vals, tails = _prime_zeta_values(float(sigma), N)
    n0 = max(k, l)
    terms = beta[n0:] * vals[n0:]
    value = float(np.sum(terms[::-1]))
    bound = float(np.sum(np.abs(beta[n0:]) * tails[n0:])) + _series_tail(terms)
    if not math.isfinite(bound):
        raise PrecisionError(f"order N={N} too small for b_{k},{l} at sigma={sigma}")
    return primes.PrimeSumResult(value, bound, N - n0 + 1)


def direct_summed_b(k: int, l: int, limit: int, sigma: float = 0.5, N: int = DEFAULT_ORDER) -> primes.PrimeSumResult:
    """sum_{p <= limit} b_{k,l}(p^-sigma), each prime's series evaluated separately."""
    beta = b_series(k, l, N).coeffs
    p = primes.cached_primes(int(limit)).astype(float)
    q = p ** (-2 * sigma)
    acc = np.zeros_like(q)
    for c in beta[::-1]:
        acc = acc * q + c
    value = float(np.sum(acc[::-1]))
    n0 = max(k, l)
    tail = sum(abs(beta[n]) * primes.prime_tail_bound(limit, 2 * n * sigma) for n in range(n0, N + 1))
    # truncation of each prime's series at q^N, dominated by p = 2
    trunc = _series_tail(beta[n0:] * 2.0 ** (-2 * sigma * np.arange(n0, N + 1))) * 2
    return primes.PrimeSumResult(value, tail + trunc, len(p))


def b_prime_table(D: int = 8, tol: float = 1e-10, N: int = DEFAULT_ORDER, sigma: float = 0.5) -> CoeffTable:
    """b'_{k,l} = (2^(k+l) k! l!)^-1 sum_p b_{k,l}(p^-sigma) for 3 <= k + l <= D.

    The expansion proper uses sigma = 1/2; ``sigma = sigma_T`` gives the
    exponent of the characteristic function at the abscissa actually
    sampled, which is what direct oracles at finite T reproduce.
    """
    if D < 3:
        raise DomainError(f"b' table needs D >= 3, got {D}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    entries = {}
    worst = 0.0
    for k, l in _exponent_pairs(D):
        if k > l:
            entries[(k, l)] = entries[(l, k)]
            continue
        r = prime_summed_b(k, l, sigma, N)
        norm = 2.0 ** (k + l) * math.factorial(k) * math.factorial(l)
        entries[(k, l)] = r.value / norm
        worst = max(worst, r.tail_bound / norm)
    if worst > tol:
        raise PrecisionError(f"b' tail bound {worst:.3e} exceeds tol {tol:.3e} at series order N={N}")
    return CoeffTable("b_prime", D, entries, tail_bound=worst, params={"sigma": sigma, "order": N})


def b_tilde_table(D: int = 8, tol: float = 1e-10, N: int = DEFAULT_ORDER) -> CoeffTable:
    """b_tilde_{k,l} = (pi i)^(k+l) / (k! l!) sum_p b_{k,l}(p^-1/2) = (2 pi i)^(k+l) b'_{k,l}."""
    bp = b_prime_table(D, tol, N)
    entries = {kl: complex((2j * math.pi) ** sum(kl) * v) for kl, v in bp.entries.items()}
    bound = bp.tail_bound * (2 * math.pi) ** D
    return CoeffTable("b_tilde", D, entries, tail_bound=bound, params=bp.params)


def exponent_series(bp: CoeffTable) -> ConjugateSeries:
    return ConjugateSeries.from_dict(bp.entries, bp.degree)


def d_from_b_prime(bp: CoeffTable, D: int | None = None) -> CoeffTable:
    """exp of the b' exponent, re-expanded in x^k y^l monomials."""
    D = bp.degree if D is None else D
    if D < 3:
        return _trivial_d(D, bp.prime_limit, bp.params.get("sigma", 0.5) if bp.params else 0.5)
    expo = ConjugateSeries.from_dict(bp.entries, D)
    xy = expo.exp().to_xy()
    residue = float(np.max(np.abs(xy.imag)))
    if residue > REALNESS_TOL:
        raise PrecisionError(f"d table imaginary residue {residue:.3e} > {REALNESS_TOL}")
    real = xy.real
    entries = {(k, l): float(real[k, l]) for k in range(D + 1) for l in range(D + 1 - k)}
    # d is a polynomial in b'; propagate the b' bound to first order
    mag = sum(abs(v) for v in bp.entries.values())
    bound = bp.tail_bound * math.exp(mag) * 4.0**D
    return CoeffTable("d", D, entries, tail_bound=bound, prime_limit=bp.prime_limit, params=dict(bp.params))


def _trivial_d(D: int, prime_limit=None, sigma: float = 0.5) -> CoeffTable:
    entries = {(k, l): (1.0 if k == l == 0 else 0.0) for k in range(D + 1) for l in range(D + 1 - k)}
    return CoeffTable("d", D, entries, tail_bound=0.0, prime_limit=prime_limit, params={"sigma": sigma})


def d_table(
    D: int = 8, prime_limit: int | None = None, tol: float = 1e-10, N: int = DEFAULT_ORDER, sigma: float = 0.5
) -> CoeffTable:
    """The real coefficients d_{k,l}, k + l <= D, of the Hermite expansion.

    ``prime_limit``, when given, runs the direct sieve cross-check of every
    prime sum up to that limit and fails if the two routes disagree by more
    than their combined tail bounds.  ``sigma`` selects the abscissa of the
    prime sums (see ``b_prime_table``).
    """
    if D < 0:
        raise DomainError("D must be >= 0")
    if D < 3:
        return _trivial_d(D, prime_limit, sigma)
    bp = b_prime_table(D, tol, N, sigma)
    if prime_limit is not None:
        check = crosscheck_prime_sums(D, prime_limit, N, sigma)
        if not check["ok"]:
            raise PrecisionError(f"prime-zeta and sieve routes disagree: {check['worst']}")
        bp = CoeffTable(bp.family, D, bp.entries, bp.tail_bound, prime_limit, bp.params)
    return d_from_b_prime(bp)


def crosscheck_prime_sums(D: int, limit: int, N: int = DEFAULT_ORDER, sigma: float = 0.5) -> dict:
    """Compare sum_p b_{k,l}(p^-sigma) by prime zeta against the sieve sum to ``limit``."""
    rows = []
    ok = True
    worst = None
    for k, l in _exponent_pairs(D):
        if k > l:
            continue
        fast = prime_summed_b(k, l, sigma, N)
        slow = direct_summed_b(k, l, limit, sigma, N)
        gap = abs(fast.value - slow.value)
        budget = fast.tail_bound + slow.tail_bound
        row = {"k": k, "l": l, "prime_zeta": fast.value, "sieve": slow.value, "gap": gap, "budget": budget}
        rows.append(row)
        if gap > budget:
            ok = False
        if worst is None or gap / budget > worst["gap"] / worst["budget"]:
            worst = row
    return {"ok": ok, "rows": rows, "worst": worst}


def d_decay_check(table: CoeffTable, delta3: float = DEFAULT_DELTA3, growth_factor: float = 10.0) -> dict:
    """max_{k+l=m} |d_{k,l}| delta3^m per degree m, flagging runaway growth.

    Growth is flagged when some row exceeds ``growth_factor`` times the m=3 row.
    """
    if table.family != "d":
        raise DomainError("decay check applies to d tables")
    rows = []
    for m in range(table.degree + 1):
        vals = [abs(table[(k, m - k)]) for k in range(m + 1)]
        rows.append({"m": m, "value": max(vals) * delta3**m})
    ref = rows[3]["value"] if len(rows) > 3 else 0.0
    bounded = all(r["value"] <= growth_factor * ref for r in rows[3:]) if ref > 0 else True
    return {"delta3": delta3, "rows": rows, "bounded": bounded}
