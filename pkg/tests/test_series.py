import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetaclt import series
from zetaclt.errors import DomainError
from zetaclt.series import ConjugateSeries, TruncatedSeries


def test_neglog_power_small():
    # (-log(1-z))^2 = z^2 + z^3 + 11/12 z^4 + ...
    c = series.neglog_power_coeffs(2, 5, exact=True).coeffs
    assert list(c[:5]) == [0.0, 0.0, 1.0, 1.0, 11 / 12]


def test_a_series_product_of_c():
    a = series.a_series(2, 3, 6).coeffs
    c2 = series.neglog_power_coeffs(2, 6).coeffs
    c3 = series.neglog_power_coeffs(3, 6).coeffs
    assert np.allclose(a, c2 * c3, rtol=0, atol=1e-15)
    assert np.all(a[:3] == 0)


def test_b11_closed_form():
    exact = series.b_series_multinomial(1, 1, 30, exact=True).coeffs
    assert exact[0] == 0.0
    assert np.array_equal(exact[1:], 1.0 / np.arange(1, 31) ** 2)
    fl = series.b_series(1, 1, 30).coeffs
    assert np.allclose(fl[1:], 1.0 / np.arange(1, 31) ** 2, rtol=1e-15, atol=0)


def test_exact_mode_agrees():
    for k, l in [(1, 2), (2, 2), (3, 4)]:
        f = series.b_series_multinomial(k, l, 12).coeffs
        e = series.b_series_multinomial(k, l, 12, exact=True).coeffs
        assert np.max(np.abs(f - e)) <= 1e-13


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6))
def test_b_symmetric_bitwise(k, l):
    assert np.array_equal(series.b_series(k, l, 20).coeffs, series.b_series(l, k, 20).coeffs)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5))
def test_b_routes_agree(k, l):
    m = series.b_series(k, l, 30).coeffs
    g, residue = series.b_series_log(k, l, 30)
    assert np.max(np.abs(m - g.coeffs)) <= 1e-13 * np.max(np.abs(m))
    assert residue <= 1e-14


def test_domain_errors():
    with pytest.raises(DomainError):
        series.a_series(0, 1, 5)
    with pytest.raises(DomainError):
        series.b_series(3, 3, 2)
    with pytest.raises(DomainError):
        series.neglog_power_coeffs(3, 1)


def test_compositions_and_multinomial():
    assert sorted(series.compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert list(series.compositions(2, 3)) == []
    assert series.multinomial(5, (2, 3)) == 10.0
    assert series.multinomial(30, (15, 15)) == pytest.approx(math.comb(30, 15), rel=1e-12)


def test_truncated_series_exp_log():
    s = TruncatedSeries([0.0, 0.3, -0.1, 0.05, 0.0, 0.0, 0.0])
    back = s.exp().log()
    assert np.max(np.abs(back.coeffs - s.coeffs)) <= 1e-15
    # exp(z) coefficients
    e = TruncatedSeries([0.0, 1.0] + [0.0] * 6).exp().coeffs
    assert np.allclose(e, [1 / math.factorial(n) for n in range(8)], atol=1e-16)


def test_conjugate_series_exp_log_roundtrip():
    rng = np.random.default_rng(0)
    D = 5
    c = 0.2 * (rng.normal(size=(D + 1, D + 1)) + 1j * rng.normal(size=(D + 1, D + 1)))
    c[0, 0] = 0
    s = ConjugateSeries(c, D)
    assert np.max(np.abs(s.exp().log().coeffs - s.coeffs)) <= 1e-13
    with pytest.raises(DomainError):
        ConjugateSeries(np.ones((D + 1, D + 1)), D).exp()


def test_conjugate_series_evaluates_like_polynomial():
    D = 3
    s = ConjugateSeries.from_dict({(1, 0): 1.0, (0, 1): 1.0, (1, 2): 0.5}, D)
    x, y = 0.3, -0.2
    z = complex(x, y)
    ref = z + z.conjugate() + 0.5 * z * z.conjugate() ** 2
    assert abs(s(x, y) - ref) <= 1e-15


def test_golden_export_roundtrip(tmp_path):
    path = tmp_path / "golden.json"
    n = series.write_golden(path, 3, 8)
    rows = json.loads(path.read_text())
    assert len(rows) == n
    for r in rows:
        ref = series.a_series if r["family"] == "a" else series.b_series
        assert ref(r["k"], r["l"], 8).coeffs[r["n"]] == pytest.approx(r["value"], rel=1e-14)


def test_exact_c_small_case():
    # c_2(3) = 1/(1*2) + 1/(2*1) = 1
    assert series._neglog_power_exact(2, 3)[3] == Fraction(1)


def _c_brute(k, n):
    return sum(Fraction(1, math.prod(p)) for p in series.compositions(n, k))


def test_neglog_examples():
    c1 = series.neglog_power_coeffs(1, 20).coeffs
    assert np.array_equal(c1[1:], 1.0 / np.arange(1, 21))
    assert series.neglog_power_coeffs(2, 3).coeffs[3] == 1.0
    c3 = series.neglog_power_coeffs(3, 12).coeffs
    for n in range(13):
        assert abs(c3[n] - float(_c_brute(3, n))) <= 1e-13


def test_a_examples():
    assert series.a_series(2, 1, 4).coeffs[2] == 0.5
    a = series.a_series(2, 2, 40).at_w(0.5)
    brute = sum(float(_c_brute(2, n)) ** 2 * 0.25**n for n in range(2, 41))
    assert a == pytest.approx(brute, abs=1e-12)


def test_b_examples():
    assert np.array_equal(series.b_series(2, 1, 20).coeffs, series.a_series(2, 1, 20).coeffs) or np.allclose(
        series.b_series(2, 1, 20).coeffs, series.a_series(2, 1, 20).coeffs, rtol=1e-15, atol=0
    )
    a11 = series.a_series(1, 1, 20)
    b22 = series.b_series(2, 2, 20).coeffs
    ref = (series.a_series(2, 2, 20) - (a11 * a11) * 2).coeffs
    assert np.allclose(b22, ref, rtol=1e-14, atol=1e-15)


def test_a_symmetric_to_8():
    for k in range(1, 9):
        for l in range(1, 9):
            assert np.array_equal(series.a_series(k, l, 20).coeffs, series.a_series(l, k, 20).coeffs)


def test_a_growth_near_zero():
    for k, l in [(1, 3), (2, 2), (3, 1)]:
        ratios = [series.a_series(k, l, 60).at_w(w) / w ** (2 * max(k, l)) for w in (0.1, 0.05, 0.01)]
        assert max(ratios) <= 2 * min(ratios)


def test_conj_exp_examples():
    zero = ConjugateSeries(np.zeros((5, 5)), 4).exp().coeffs
    assert zero[0, 0] == 1 and np.count_nonzero(zero) == 1
    c = 0.37
    e = ConjugateSeries.from_dict({(1, 1): c}, 8).exp().coeffs
    for m in range(5):
        assert e[m, m] == pytest.approx(c**m / math.factorial(m), rel=1e-15)
    assert np.count_nonzero(e) == 5
