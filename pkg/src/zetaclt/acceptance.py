"""The ten numbered acceptance criteria, each runnable on its own.

Every criterion returns a ``CriterionResult`` with the measured numbers, the
tolerance it was held to and the wall time; a criterion passes only when
its checks hold and it ran inside its time limit.  ``quick=True`` shrinks
sample counts and sieve limits for smoke runs (the CLI ``--quick`` flag);
the tolerances stay the same.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from . import primes, randmodel, zetaline
from .coeffs import (
    ExpansionParams,
    _series_tail,
    b_prime_table,
    crosscheck_prime_sums,
    d_table,
)
from .density import (
    DensityModel,
    Rectangle,
    density_F,
    density_truncation_budget,
    rect_probability,
    rect_truncation_budget,
    rectangle_panel,
)
from .hermite import hermite_rect_integral
from .series import BoundParams, a_series, b_series, b_series_log, b_series_multinomial

THETA = 0.3
T_HEADLINE = 1e6
DEGREE = 8
MC_PRIME_LIMIT = 10**4


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    tolerance: str
    seconds: float
    limit_seconds: float
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} [{self.number:2d}] {self.title} ({self.seconds:.1f} s / {self.limit_seconds:.0f} s) {self.tolerance}"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "seconds": self.seconds,
            "limit_seconds": self.limit_seconds,
            "measured": _jsonable(self.measured),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _result(number, title, ok, tol, timer, limit, measured):
    return CriterionResult(number, title, bool(ok and timer.seconds <= limit), tol, timer.seconds, limit, measured)


def headline_params(degree: int = DEGREE) -> ExpansionParams:
    return ExpansionParams.build(THETA, T_HEADLINE, degree)


# -- 1: coefficient exactness ----------------------------------------------------


@lru_cache(maxsize=None)
def _c_enum(k: int, n: int) -> Fraction:
    """sum over ordered (n_1..n_k), n_i >= 1, sum n_i = n, of 1/(n_1...n_k), by brute force."""
    total = Fraction(0)
    for parts in itertools.product(range(1, n + 1), repeat=k):
        if sum(parts) == n:
            den = 1
            for p in parts:
                den *= p
            total += Fraction(1, den)
    return total


def _parts(total: int, n: int):
    return [p for p in itertools.product(range(1, total + 1), repeat=n) if sum(p) == total]


def _mult(n: int, parts) -> int:
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def _a_enum(k: int, l: int, m: int) -> Fraction:
    return _c_enum(k, m) * _c_enum(l, m) if m >= 1 else Fraction(0)


def _b_enum(k: int, l: int, m: int) -> Fraction:
    """Coefficient of w^(2m) in b_{k,l} from the multinomial sum, every index enumerated."""
    total = Fraction(0)
    for n in range(1, min(k, l) + 1):
        inner = Fraction(0)
        for ks in _parts(k, n):
            for ls in _parts(l, n):
                weight = _mult(k, ks) * _mult(l, ls)
                # coefficient of q^m in prod_i a_{k_i, l_i}(q)
                conv = Fraction(0)
                for ms in _parts(m, n) if m >= n else []:
                    term = Fraction(1)
                    for ki, li, mi in zip(ks, ls, ms):
                        term *= _a_enum(ki, li, mi)
                    conv += term
                inner += weight * conv
        total += Fraction((-1) ** (n - 1), n) * inner
    return total


def criterion_1(quick: bool = False) -> CriterionResult:
    K, N = 4, 12
    worst = {"a": 0.0, "b_multinomial": 0.0, "b_log": 0.0}
    with _Timer() as tm:
        for k in range(1, K + 1):
            for l in range(1, K + 1):
                a = a_series(k, l, N).coeffs
                bm = b_series(k, l, N).coeffs
                bl = b_series_log(k, l, N)[0].coeffs
                for m in range(N + 1):
                    ea, eb = float(_a_enum(k, l, m)), float(_b_enum(k, l, m))
                    worst["a"] = max(worst["a"], abs(a[m] - ea))
                    worst["b_multinomial"] = max(worst["b_multinomial"], abs(bm[m] - eb))
                    worst["b_log"] = max(worst["b_log"], abs(bl[m] - eb))
    ok = all(v <= 1e-12 for v in worst.values())
    return _result(1, "a/b series vs composition enumeration", ok, "per coefficient <= 1e-12", tm, 10, worst)


# -- 2: b-series properties ---------------------------------------------------------


def _eval_with_tail(coeffs: np.ndarray, w: float) -> tuple[float, float]:
    q = w * w
    terms = coeffs * q ** np.arange(len(coeffs))
    return math.fsum(terms), _series_tail(terms)


def criterion_2(quick: bool = False) -> CriterionResult:
    K, N = 6, 60
    m = {"symmetry_violations": 0, "realness_residue": 0.0, "bound_violations": [], "growth_violations": []}
    with _Timer() as tm:
        for k in range(1, K + 1):
            for l in range(1, K + 1):
                if not np.array_equal(a_series(k, l, N).coeffs, a_series(l, k, N).coeffs):
                    m["symmetry_violations"] += 1
                if not np.array_equal(b_series(k, l, N).coeffs, b_series(l, k, N).coeffs):
                    m["symmetry_violations"] += 1
                m["realness_residue"] = max(m["realness_residue"], b_series_log(k, l, N)[1])
                for r in (0.3, 1 / math.sqrt(2)):
                    C = BoundParams(r).C_r
                    for w in (r / 2, r):
                        av, at = _eval_with_tail(a_series(k, l, N).coeffs, w)
                        bv, bt = _eval_with_tail(b_series(k, l, N).coeffs, w)
                        cap_a = (C * w) ** (k + l)
                        cap_b = C ** (k + l) * min(k, l) ** (k + l) * w ** (k + l)
                        if not (av > 0 and av + at <= cap_a and abs(bv) + bt <= cap_b):
                            m["bound_violations"].append([k, l, r, w])
                ratios = []
                for w in (0.1, 0.05, 0.01):
                    v, _ = _eval_with_tail(a_series(k, l, N).coeffs, w)
                    ratios.append(v / w ** (2 * max(k, l)))
                if not (all(np.isfinite(ratios)) and ratios[0] >= ratios[1] >= ratios[2] > 0):
                    m["growth_violations"].append([k, l])
    ok = (
        m["symmetry_violations"] == 0
        and m["realness_residue"] <= 1e-14
        and not m["bound_violations"]
        and not m["growth_violations"]
    )
    return _result(2, "b-series symmetry, realness, bounds", ok, "exact / 1e-14 / bounds hold", tm, 30, m)


# -- 3: b_{1,1} closed form --------------------------------------------------------


def criterion_3(quick: bool = False) -> CriterionResult:
    N = 60
    with _Timer() as tm:
        exact = b_series_multinomial(1, 1, N, exact=True).coeffs
        mismatches = [m for m in range(1, N + 1) if exact[m] != 1.0 / (m * m)]
        fl = b_series(1, 1, N).coeffs
        float_err = max(abs(fl[m] - 1.0 / (m * m)) for m in range(1, N + 1))
        val, tail = _eval_with_tail(fl, 1 / math.sqrt(2))
        err = abs(val - 0.5822405265)
    ok = not mismatches and err <= 1e-9
    meas = {"exact_mismatches": mismatches, "float_route_max_err": float_err, "sum_2^-m/m^2": val, "tail": tail, "err": err}
    return _result(3, "b_{1,1} = sum w^2m/m^2", ok, "exact coefficients; sum to 1e-9", tm, 10, meas)


# -- 4: d-table structure ----------------------------------------------------------


def criterion_4(quick: bool = False) -> CriterionResult:
    D = 12
    with _Timer() as tm:
        d = d_table(D)
        bp = b_prime_table(D)
        low = max(abs(d[(k, l)]) for k in range(3) for l in range(3) if 1 <= k + l <= 2)
        odd = max(abs(d[(k, l)]) for k in range(D + 1) for l in range(1, D + 1 - k, 2))
        two_b = 2 * bp[(1, 2)]
        slice3 = {
            "d30": d[(3, 0)] - two_b,
            "d12": d[(1, 2)] - two_b,
            "d21": d[(2, 1)],
            "d03": d[(0, 3)],
        }
    ok = d[(0, 0)] == 1.0 and low <= 1e-13 and odd <= 1e-13 and all(abs(v) <= 1e-12 for v in slice3.values())
    meas = {"d00": d[(0, 0)], "max_low_degree": low, "max_odd_l": odd, "degree3_residuals": slice3, "2b'12": two_b}
    return _result(4, "d-table structure (D=12)", ok, "1e-13 zeros; degree-3 slice 1e-12", tm, 60, meas)


# -- 5: prime-zeta acceleration ------------------------------------------------------


def criterion_5(quick: bool = False) -> CriterionResult:
    limit = 10**6 if quick else 10**7
    with _Timer() as tm:
        rep = crosscheck_prime_sums(8, limit)
    worst = rep["worst"]
    meas = {"limit": limit, "pairs": len(rep["rows"]), "worst_gap": worst["gap"], "worst_budget": worst["budget"], "worst_kl": [worst["k"], worst["l"]]}
    return _result(5, f"b' prime zeta vs sieve to {limit:.0e}", rep["ok"], "within combined tail bounds", tm, 120, meas)


# -- 6: J oracle and the log J residual trend -------------------------------------------------


def criterion_6(quick: bool = False) -> CriterionResult:
    rng = np.random.default_rng(6)
    with _Timer() as tm:
        worst = 0.0
        worst_tail = 0.0
        for _ in range(25):
            r = 0.2 * math.sqrt(rng.uniform())
            a = rng.uniform(0, 2 * math.pi)
            w = rng.uniform(0, 0.5)
            u, v = r * math.cos(a), r * math.sin(a)
            q = randmodel.J_quadrature(u, v, w)
            s, tail = randmodel.J_series(u, v, w, D=16)
            worst = max(worst, abs(q - s))
            worst_tail = max(worst_tail, tail)
        u, v = 0.06, 0.05
        residuals = {}
        for T in (1e4, 1e8, 1e16):
            sig = primes.sigma_T(THETA, T)
            residuals[f"{T:.0e}"] = float(randmodel.log_J_vs_expansion(u, v, sig, MC_PRIME_LIMIT, DEGREE))
    vals = list(residuals.values())
    decreasing = all(x > y for x, y in zip(vals, vals[1:]))
    ok = worst <= 1e-10 and worst_tail < 1e-11 and decreasing
    meas = {"max_quadrature_vs_series": worst, "series_tail": worst_tail, "log_J_residuals": residuals, "uv": [u, v]}
    return _result(6, "J quadrature vs a-series; log J residual trend", ok, "1e-10; strictly decreasing in T", tm, 60, meas)


# -- 7: density oracle equivalence ---------------------------------------------------------

GRID_POINTS = [(x, y) for x in (-0.6, 0.0, 0.6) for y in (-0.6, 0.0, 0.6)]


def criterion_7(quick: bool = False) -> CriterionResult:
    """density_F at D=8 against Fourier inversion of prod_p J at sigma_T.

    The expansion is built from prime sums at sigma_T (the law the oracle
    inverts).  The truncation budget at each point is the absolute sum of
    the omitted terms of degrees 9..16.
    """
    p = headline_params()
    with _Timer() as tm:
        xs = np.array([g[0] for g in GRID_POINTS])
        ys = np.array([g[1] for g in GRID_POINTS])
        oracle = randmodel.fourier_invert_density(p, xs, ys)
        model = DensityModel.build(p, matched=True)
        F = density_F(model, xs, ys)
        budget = np.maximum(1e-6, density_truncation_budget(model, xs, ys))
        gap = np.abs(F - oracle)
        half = density_F(DensityModel.build(p), xs, ys)
    ok = bool(np.all(gap <= budget))
    meas = {
        "points": GRID_POINTS,
        "oracle": oracle.tolist(),
        "expansion": F.tolist(),
        "gap": gap.tolist(),
        "budget": budget.tolist(),
        "min_margin": float(np.min(budget - gap)),
        "half_table_gap": np.abs(half - oracle).tolist(),
    }
    return _result(7, "density_F (D=8) vs Fourier inversion", ok, "max(1e-6, truncation budget)", tm, 300, meas)


# -- 8: normalization and Hermite integrals --------------------------------------------------


def criterion_8(quick: bool = False) -> CriterionResult:
    with _Timer() as tm:
        full = {}
        for D in (0, 3, 8):
            full[D] = rect_probability(DensityModel.build(headline_params(D)), Rectangle.plane())
        q0 = rect_probability(DensityModel.build(headline_params(0)), rectangle_panel()["Q1"])
        sp = math.sqrt(math.pi)
        worst = 0.0
        for n in range(11):
            for x1, x2 in ((-0.7, 1.3), (-2.0, -0.1), (0.25, 3.0)):
                f = lambda x, n=n: mpmath.exp(-mpmath.pi * x * x) * mpmath.hermite(n, sp * x)
                ref = float(mpmath.quad(f, [x1, 0, x2] if x1 < 0 < x2 else [x1, x2]))
                worst = max(worst, abs(hermite_rect_integral(n, x1, x2) - ref))
    ok = all(v == 1.0 for v in full.values()) and q0 == 0.25 and worst <= 1e-10
    meas = {"full_plane": full, "D0_quadrant": q0, "hermite_vs_quadrature": worst}
    return _result(8, "normalization, D=0 quadrant, Hermite integrals", ok, "exact / exact / 1e-10", tm, 60, meas)


# -- 9: Monte-Carlo headline -------------------------------------------------------------------


def criterion_9(quick: bool = False, samples: int | None = None) -> CriterionResult:
    p = headline_params()
    N = samples or (10**5 if quick else 10**6)
    with _Timer() as tm:
        cfg = randmodel.RandomEulerConfig(p.sigma_T, MC_PRIME_LIMIT, N)
        mc = randmodel.sample_log_zeta_random(cfg)
        tail = randmodel.tail_rect_budget(mc.header["tail_std"], p.psi)
        model = DensityModel.build(p, matched=True)
        half = DensityModel.build(p)
        rows = {}
        ok = True
        for name, rect in rectangle_panel().items():
            e = rect_probability(model, rect)
            v, se = mc.rect_probability(rect, p.psi)
            trunc = rect_truncation_budget(model, rect)
            budget = 4 * se + tail + trunc
            rows[name] = {
                "expansion": e,
                "mc": v,
                "stderr": se,
                "gap": abs(e - v),
                "budget": budget,
                "truncation": trunc,
                "half_table": rect_probability(half, rect),
            }
            ok &= abs(e - v) <= budget
    meas = {"samples": N, "prime_limit": MC_PRIME_LIMIT, "tail_budget": tail, "rows": rows}
    return _result(9, f"random-model MC (N={N:.0e}) vs rect_probability", ok, "4 stderr + tail + truncation", tm, 600, meas)


# -- 10: zeta-line structural check --------------------------------------------------------------


def criterion_10(quick: bool = False, samples: int | None = None, progress=None) -> CriterionResult:
    p = headline_params()
    n = samples or (400 if quick else 10**4)
    with _Timer() as tm:
        m = zetaline.empirical_zeta_measure(THETA, T_HEADLINE, n, randmodel.DEFAULT_SEED, progress=progress)
        model = DensityModel.build(p, matched=True)
        half = DensityModel.build(p)
        rows = {}
        ok = m.excluded / n <= zetaline.MAX_EXCLUSION
        for name, rect in rectangle_panel().items():
            if name == "square":
                continue
            e = rect_probability(model, rect)
            v, se = m.rect_probability(rect, p.psi)
            rows[name] = {"expansion": e, "zeta_line": v, "stderr": se, "gap": abs(e - v), "half_table": rect_probability(half, rect)}
            ok &= abs(e - v) <= 0.05
    meas = {"samples": n, "excluded": m.excluded, "rows": rows, "mean": m.mean()[0]}
    return _result(10, f"zeta-line measure ({n} samples) vs expansion", ok, "0.05 per quadrant; exclusions <= 1%", tm, 1800, meas)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run(numbers=None, quick: bool = False, echo=print) -> list[CriterionResult]:
    out = []
    for k in numbers or sorted(CRITERIA):
        r = CRITERIA[k](quick=quick)
        if echo:
            echo(r.line())
        out.append(r)
    return out
