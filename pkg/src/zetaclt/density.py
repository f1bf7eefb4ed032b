"""The Hermite expansion of the density of log zeta(sigma_T, X) and its
rectangle probabilities.

Two equivalent forms are implemented:

* ``density_F`` -- the density in raw log-zeta coordinates,
      e^{-(x^2+y^2)/psi} sum d_{k,l} / (pi psi^{(k+l+2)/2}) H_k(x/sqrt psi) H_l(y/sqrt psi)
* ``rect_probability`` -- the mass of a rectangle in the plane normalized by
  sqrt(pi psi), sum d_{k,l} psi^{-(k+l)/2} I_k(a, b) I_l(c, d) with
  I_n(a, b) = int_a^b e^{-pi x^2} H_n(sqrt(pi) x) dx.

They are related by the substitution x -> sqrt(pi psi) x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .coeffs import CoeffTable, ExpansionParams, d_table
from .errors import DomainError, OrderError
from .hermite import hermite_all, hermite_rect_integrals


@dataclass(frozen=True)
class Rectangle:
    """[a, b] x [c, d]; infinite endpoints are allowed."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if math.isnan(v):
                raise DomainError("rectangle coordinates must not be NaN")
        if self.a > self.b or self.c > self.d:
            raise OrderError(f"empty rectangle {self.as_tuple()}")

    @classmethod
    def parse(cls, text: str) -> Rectangle:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise DomainError(f"rectangle needs four comma-separated numbers, got {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise DomainError(f"rectangle coordinates must be numbers or inf, got {text!r}") from None
        return cls(*vals)

    @classmethod
    def plane(cls) -> Rectangle:
        return cls(-math.inf, math.inf, -math.inf, math.inf)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def degenerate(self) -> bool:
        return self.a == self.b or self.c == self.d

    def mirror_y(self) -> Rectangle:
        return Rectangle(self.a, self.b, -self.d, -self.c)

    def scaled(self, factor: float) -> Rectangle:
        return Rectangle(self.a * factor, self.b * factor, self.c * factor, self.d * factor)

    def contains(self, x, y):
        return (x >= self.a) & (x <= self.b) & (y >= self.c) & (y <= self.d)

    def to_json(self) -> list:
        return [_json_float(v) for v in self.as_tuple()]


def _json_float(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


QUADRANTS = {
    "Q1": Rectangle(0, math.inf, 0, math.inf),
    "Q2": Rectangle(-math.inf, 0, 0, math.inf),
    "Q3": Rectangle(-math.inf, 0, -math.inf, 0),
    "Q4": Rectangle(0, math.inf, -math.inf, 0),
}


def rectangle_panel() -> dict[str, Rectangle]:
    """The four unit quadrants and the centred square [-1, 1]^2."""
    panel = dict(QUADRANTS)
    panel["square"] = Rectangle(-1, 1, -1, 1)
    return panel


@dataclass(frozen=True)
class DensityModel:
    params: ExpansionParams
    d: CoeffTable
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d.family != "d":
            raise DomainError("density model needs a d-family table")

    @property
    def degree(self) -> int:
        return min(self.params.degree, self.d.degree)

    @property
    def psi(self) -> float:
        return self.params.psi

    def d_array(self) -> np.ndarray:
        D = self.degree
        arr = self.d.as_array().real[: D + 1, : D + 1].copy()
        k, l = np.indices(arr.shape)
        arr[(k + l) > D] = 0.0
        return arr

    @classmethod
    def build(cls, params: ExpansionParams, d: CoeffTable | None = None, matched: bool = False) -> DensityModel:
        """Model with the standard table, or with prime sums taken at sigma_T when ``matched``."""
        if d is None:
            d = d_table(params.degree, sigma=params.sigma_T if matched else 0.5)
        return cls(params, d, {"matched": matched})

    def with_degree(self, D: int) -> DensityModel:
        if D > self.d.degree:
            raise DomainError(f"table only has degree {self.d.degree}")
        p = self.params
        return DensityModel(replace(p, degree=D), self.d, self.meta)

    def extended(self, D: int) -> DensityModel:
        """Same parameters and abscissa, coefficient table rebuilt to degree D."""
        sigma = self.d.params.get("sigma", 0.5) if self.d.params else 0.5
        return DensityModel(replace(self.params, degree=D), d_table(D, sigma=sigma), self.meta)


def density_F(model: DensityModel, x, y):
    """Expansion density at raw coordinates (x, y); vectorized over arrays."""
    psi = model.psi
    D = model.degree
    s = math.sqrt(psi)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hx = hermite_all(D, x / s)
    hy = hermite_all(D, y / s)
    d = model.d_array()
    total = np.zeros(np.broadcast(x, y).shape)
    for k in range(D + 1):
        for l in range(D + 1 - k):
            if d[k, l] != 0.0:
                total = total + d[k, l] / s ** (k + l) * hx[k] * hy[l]
    out = np.exp(-(x * x + y * y) / psi) * total / (math.pi * psi)
    return out if out.ndim else float(out)


def _density_terms(model: DensityModel, x, y, lo: int, hi: int):
    psi = model.psi
    s = math.sqrt(psi)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hx = hermite_all(hi, x / s)
    hy = hermite_all(hi, y / s)
    d = model.d.as_array().real
    g = np.exp(-(x * x + y * y) / psi) / (math.pi * psi)
    for k in range(hi + 1):
        for l in range(hi + 1 - k):
            if lo <= k + l <= hi and d[k, l] != 0.0:
                yield d[k, l] / s ** (k + l) * hx[k] * hy[l] * g


def density_truncation_budget(model: DensityModel, x, y, factor: int = 2):
    """Pointwise envelope of the omitted terms of degree D+1..factor*D.

    sum_{D < k+l <= factor D} |d_{k,l} psi^{-(k+l)/2} H_k H_l e^{...}| / (pi psi),
    with the table rebuilt to the higher degree at the model's abscissa.
    """
    D = model.degree
    big = model.extended(max(factor * D, D + 1))
    shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
    total = np.zeros(shape)
    for t in _density_terms(big, x, y, D + 1, big.degree):
        total = total + np.abs(t)
    return total if total.ndim else float(total)


def rect_truncation_budget(model: DensityModel, rect: Rectangle, factor: int = 2) -> float:
    """Envelope of the omitted rectangle terms of degree D+1..factor*D."""
    D = model.degree
    big = model.extended(max(factor * D, D + 1))
    terms = rect_probability_detail(big, rect).terms
    return math.fsum(abs(v) for (k, l), v in terms.items() if k + l > D)


def density_flags(values) -> list[str]:
    flags = []
    if np.any(np.asarray(values) < 0):
        flags.append("negative_density")
    return flags


@dataclass(frozen=True)
class RectProbability:
    value: float
    gaussian_leading_term: float
    correction_bound: float
    terms: dict

    @property
    def flags(self) -> list[str]:
        f = []
        if self.value < 0 or self.value > 1:
            f.append("outside_unit_interval")
        return f


def rect_probability_detail(model: DensityModel, rect: Rectangle) -> RectProbability:
    """Rectangle mass in the sqrt(pi psi)-normalized plane, term by term.

    ``correction_bound`` is sum_{k+l>=3} |d_{k,l}| psi^{-(k+l)/2} |I_k| |I_l|,
    the triangle-inequality envelope for value - gaussian_leading_term.
    """
    D = model.degree
    if rect.degenerate:
        return RectProbability(0.0, 0.0, 0.0, {})
    ix = hermite_rect_integrals(D, rect.a, rect.b)
    iy = hermite_rect_integrals(D, rect.c, rect.d)
    d = model.d_array()
    psi = model.psi
    lead = float(d[0, 0] * ix[0] * iy[0])
    terms = {}
    for k in range(D + 1):
        for l in range(D + 1 - k):
            if d[k, l] != 0.0:
                terms[(k, l)] = float(d[k, l] * psi ** (-(k + l) / 2) * ix[k] * iy[l])
    value = math.fsum(terms.values())
    bound = math.fsum(abs(v) for (k, l), v in terms.items() if k + l >= 3)
    return RectProbability(value, lead, bound, terms)


def rect_probability(model: DensityModel, rect: Rectangle) -> float:
    return rect_probability_detail(model, rect).value


def normalized_to_raw(rect: Rectangle, psi: float) -> Rectangle:
    """Scale a rectangle in the normalized plane to raw log-zeta coordinates."""
    if psi <= 0:
        raise DomainError("psi must be positive")
    return rect.scaled(math.sqrt(math.pi * psi))


def raw_to_normalized(rect: Rectangle, psi: float) -> Rectangle:
    if psi <= 0:
        raise DomainError("psi must be positive")
    return rect.scaled(1.0 / math.sqrt(math.pi * psi))


def density_grid(model: DensityModel, xs, ys) -> np.ndarray:
    """Rows of (x, y, F) over the Cartesian grid xs by ys."""
    X, Y = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), indexing="ij")
    F = density_F(model, X, Y)
    return np.column_stack([X.ravel(), Y.ravel(), np.ravel(F)])
