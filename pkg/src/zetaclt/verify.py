"""Self-check suites behind ``zetaclt verify``.

Each suite is a list of named checks; a check returns (passed, detail).
Suites mix the numbered acceptance criteria with the module invariants
that are cheap enough to run on every invocation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import acceptance, primes, randmodel, zetaline
from .coeffs import CoeffTable, d_decay_check, d_table
from .density import DensityModel, Rectangle, density_F, rect_probability
from .hermite import gauss_phi, hermite, hermite_rect_integral
from .series import ConjugateSeries, b_series, b_series_log

SUITE_NAMES = ("series", "coeffs", "hermite", "density", "randmodel", "zetaline", "all")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}: {self.name} ({self.seconds:.2f} s)"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "detail": acceptance._jsonable(self.detail),
        }


def _criterion(n: int):
    def run(quick: bool):
        r = acceptance.CRITERIA[n](quick=quick)
        return r.passed, r.to_dict()

    run.__name__ = f"criterion {n}"
    return run


# -- series ----------------------------------------------------------------------


def _conj_roundtrip(quick):
    rng = np.random.default_rng(1)
    D = 6
    c = np.zeros((D + 1, D + 1), dtype=complex)
    for k in range(D + 1):
        for l in range(D + 1 - k):
            if k + l >= 1:
                c[k, l] = complex(*rng.normal(size=2)) * 0.3
    s = ConjugateSeries(c, D)
    err = float(np.max(np.abs(s.exp().log().coeffs - s.coeffs)))
    return err <= 1e-12, {"max_err": err}


def _conj_product(quick):
    rng = np.random.default_rng(2)
    D = 6
    a = ConjugateSeries(rng.normal(size=(D + 1, D + 1)) + 1j * rng.normal(size=(D + 1, D + 1)), D)
    b = ConjugateSeries(rng.normal(size=(D + 1, D + 1)) + 1j * rng.normal(size=(D + 1, D + 1)), D)
    prod = (a * b).coeffs
    worst = 0.0
    for k in range(D + 1):
        for l in range(D + 1 - k):
            ref = sum(
                a.coeffs[i, j] * b.coeffs[k - i, l - j] for i in range(k + 1) for j in range(l + 1)
            )
            worst = max(worst, abs(prod[k, l] - ref))
    return worst <= 1e-12, {"max_err": worst}


def _b_routes(quick):
    worst = 0.0
    for k in range(1, 5):
        for l in range(1, 6 - k):
            m = b_series(k, l, 40).coeffs
            g, _ = b_series_log(k, l, 40)
            worst = max(worst, float(np.max(np.abs(m - g.coeffs))))
    return worst <= 1e-12, {"max_route_diff": worst}


# -- coeffs --------------------------------------------------------------------------


def _decay(quick):
    rep = d_decay_check(d_table(12), delta3=0.3)
    zero_rows = all(r["value"] == 0.0 for r in rep["rows"][1:3])
    return rep["bounded"] and zero_rows, rep


def _json_roundtrip(quick):
    t = d_table(8)
    back = CoeffTable.from_json(t.to_json())
    return back == t, {"entries": len(t.entries)}


def _psi_envelope(quick):
    r = primes.psi_T(0.3, 1e6)
    gap = abs(r.value - 0.3 * math.log(math.log(1e6)))
    return gap <= 2, {"psi": r.value, "gap": gap}


# -- hermite -----------------------------------------------------------------------------


def _hermite_values(quick):
    ok = hermite(0, 0.7) == 1.0 and hermite(1, 0.7) == 1.4 and hermite(5, 1.0) == -8.0
    ok &= gauss_phi(0.0) == 0.0 and abs(gauss_phi(9.0) - 0.5) <= 1e-15
    ref = float(mpmath.quad(lambda u: mpmath.exp(-mpmath.pi * u * u), [0, 1]))
    err = abs(gauss_phi(1.0) - ref)
    return ok and err <= 1e-13, {"phi(1)_err": err}


def _orthogonality(quick):
    sp = math.sqrt(math.pi)
    worst = 0.0
    for m in range(13):
        for n in range(m + 1, 13 - m):
            f = lambda x, m=m, n=n: mpmath.exp(-mpmath.pi * x * x) * mpmath.hermite(m, sp * x) * mpmath.hermite(n, sp * x)
            worst = max(worst, abs(float(mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf]))))
    return worst <= 1e-10, {"max_inner_product": worst}


def _full_line(quick):
    vals = [hermite_rect_integral(n, -math.inf, math.inf) for n in range(1, 20)]
    return all(v == 0.0 for v in vals) and hermite_rect_integral(0, -math.inf, math.inf) == 1.0, {}


# -- density ----------------------------------------------------------------------------------


def _y_symmetry(quick):
    model = DensityModel.build(acceptance.headline_params())
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        a, b = sorted(rng.uniform(-2, 2, 2))
        c, d = sorted(rng.uniform(-2, 2, 2))
        r = Rectangle(a, b, c, d)
        worst = max(worst, abs(rect_probability(model, r) - rect_probability(model, r.mirror_y())))
    return worst <= 1e-12, {"max_diff": worst}


def _two_forms(quick):
    """rect_probability against a 2-d quadrature of density_F over the scaled rectangle."""
    from numpy.polynomial.legendre import leggauss

    p = acceptance.headline_params()
    model = DensityModel.build(p)
    s = math.sqrt(math.pi * p.psi)
    nodes, weights = leggauss(60)
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(3 if quick else 5):
        a, b = sorted(rng.uniform(-1.5, 1.5, 2))
        c, d = sorted(rng.uniform(-1.5, 1.5, 2))
        xs = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        ys = 0.5 * (d - c) * nodes + 0.5 * (c + d)
        X, Y = np.meshgrid(xs * s, ys * s, indexing="ij")
        W = np.outer(weights, weights) * 0.25 * (b - a) * (d - c) * s * s
        quad = float(np.sum(W * density_F(model, X, Y)))
        worst = max(worst, abs(quad - rect_probability(model, Rectangle(a, b, c, d))))
    return worst <= 1e-8, {"max_diff": worst}


def _gaussian_reduction(quick):
    p = acceptance.headline_params(0)
    model = DensityModel.build(p)
    v = density_F(model, 0.3, -0.2)
    ref = math.exp(-(0.09 + 0.04) / p.psi) / (math.pi * p.psi)
    return abs(v - ref) <= 1e-15, {"diff": abs(v - ref)}


# -- randmodel --------------------------------------------------------------------------------


def _mc_reproducible(quick):
    s = primes.sigma_T(0.3, 1e6)
    cfg = randmodel.RandomEulerConfig(s, 1000, 20000, seed=11)
    a = randmodel.sample_log_zeta_random(cfg).samples
    b = randmodel.sample_log_zeta_random(cfg, chunk=777).samples
    other = randmodel.sample_log_zeta_random(randmodel.RandomEulerConfig(s, 1000, 20000, seed=12))
    psi = primes.psi_sigma(s).value
    q = acceptance.rectangle_panel()["Q1"]
    ref = randmodel.EmpiricalMeasure(a, 11)
    v1, e1 = ref.rect_probability(q, psi)
    v2, e2 = other.rect_probability(q, psi)
    ok = np.array_equal(a, b) and abs(v1 - v2) <= 6 * math.hypot(e1, e2)
    return ok, {"seed_diff": abs(v1 - v2), "budget": 6 * math.hypot(e1, e2)}


def _hermitian(quick):
    s = primes.sigma_T(0.3, 1e6)
    u = np.array([0.3, -0.7, 1.1, 0.05])
    v = np.array([0.2, 0.4, -0.9, 0.0])
    a = randmodel.phi_rand(u, v, s, 2000)
    b = randmodel.phi_rand(-u, -v, s, 2000)
    err = float(np.max(np.abs(b - np.conj(a))))
    return err <= 1e-12, {"max_defect": err}


# -- zetaline -----------------------------------------------------------------------------------


def _zeta_values(quick):
    e2 = abs(zetaline.zeta_em(2) - math.pi**2 / 6)
    e3 = abs(zetaline.zeta_em(3) - 1.2020569031595942)
    return e2 <= 1e-12 and e3 <= 1e-10, {"s=2": e2, "s=3": e3}


def _eta_oracle(quick):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(10 if quick else 50):
        s = complex(rng.uniform(0.7, 3), rng.uniform(-200, 200))
        ref = eta_zeta(s)
        worst = max(worst, abs(zetaline.zeta_em(s) - ref) / abs(ref))
    return worst <= 1e-9, {"max_rel_err": worst}


def eta_zeta(s: complex) -> complex:
    """zeta(s) from the alternating series for eta by Borwein's acceleration, in mpmath.

    The weights grow like e^{pi |t| / 2}, so the working precision is raised
    to absorb the cancellation.
    """
    t = abs(s.imag)
    extra = int(math.pi * t / 2 / math.log(2)) + 40
    with mpmath.workprec(53 + extra):
        n = int((extra + 40) * math.log(2) / math.log(3 + math.sqrt(8))) + 10
        ss = mpmath.mpc(s.real, s.imag)
        d = []
        acc = mpmath.mpf(0)
        for i in range(n + 1):
            acc += mpmath.factorial(n + i - 1) * mpmath.mpf(4) ** i / (mpmath.factorial(n - i) * mpmath.factorial(2 * i))
            d.append(n * acc)
        tot = mpmath.mpf(0)
        for k in range(n):
            tot += (-1) ** k * (d[k] - d[n]) / mpmath.power(k + 1, ss)
        val = -tot / (d[n] * (1 - mpmath.power(2, 1 - ss)))
        return complex(val)


def _line_consistency(quick):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20 if quick else 100):
        sig = rng.uniform(0.7, 1.0)
        t = rng.uniform(1e3, 1e4)
        v = zetaline.log_zeta_line(sig, t).value
        z = zetaline.zeta_em(complex(sig, t))
        worst = max(worst, abs(np.exp(v) - z) / abs(z))
    return worst <= 1e-9, {"max_rel_err": worst}


SUITES = {
    "series": [_criterion(1), _criterion(2), _criterion(3), _conj_roundtrip, _conj_product, _b_routes],
    "coeffs": [_criterion(4), _criterion(5), _decay, _json_roundtrip, _psi_envelope],
    "hermite": [_hermite_values, _orthogonality, _full_line],
    "density": [_criterion(8), _criterion(7), _y_symmetry, _two_forms, _gaussian_reduction],
    "randmodel": [_criterion(6), _criterion(9), _mc_reproducible, _hermitian],
    "zetaline": [_zeta_values, _eta_oracle, _line_consistency, _criterion(10)],
}


def run_suite(name: str, quick: bool = False, echo=print) -> list[Check]:
    if name not in SUITE_NAMES:
        raise KeyError(name)
    names = [n for n in SUITE_NAMES if n != "all"] if name == "all" else [name]
    out = []
    for suite in names:
        for fn in SUITES[suite]:
            t0 = time.perf_counter()
            try:
                ok, detail = fn(quick)
            except Exception as exc:  # a crashing check is a failing check
                ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
            c = Check(suite, fn.__name__.lstrip("_").replace("_", " "), bool(ok), time.perf_counter() - t0, detail)
            if echo:
                echo(c.line())
            out.append(c)
    return out
