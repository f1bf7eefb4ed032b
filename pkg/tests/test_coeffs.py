import math

import numpy as np
import pytest

from zetaclt import coeffs, primes
from zetaclt.coeffs import CoeffTable, ExpansionParams
from zetaclt.errors import DomainError, PrecisionError


@pytest.fixture(scope="module")
def d12():
    return coeffs.d_table(12)


def test_d00_is_one(d12):
    assert d12[(0, 0)] == 1.0


def test_low_degree_and_odd_l_vanish(d12):
    arr = d12.as_array()
    for k in range(13):
        for l in range(13 - k):
            if k + l in (1, 2) or l % 2:
                assert abs(arr[k, l]) <= 1e-13


def test_degree_three_slice(d12):
    bp = coeffs.b_prime_table(3)
    assert d12[(3, 0)] == pytest.approx(2 * bp[(1, 2)], abs=1e-12)
    assert d12[(1, 2)] == pytest.approx(2 * bp[(1, 2)], abs=1e-12)
    assert d12[(2, 1)] == 0 and d12[(0, 3)] == 0


def test_trivial_table():
    t = coeffs.d_table(2)
    assert t.entries[(0, 0)] == 1.0
    assert all(v == 0.0 for kl, v in t.entries.items() if kl != (0, 0))


def test_json_roundtrip(tmp_path, d12):
    p = tmp_path / "d.json"
    d12.save(p)
    assert CoeffTable.load(p) == d12
    bt = coeffs.b_tilde_table(5)
    assert CoeffTable.from_json(bt.to_json()) == bt


def test_b_tilde_relation():
    bp = coeffs.b_prime_table(6)
    bt = coeffs.b_tilde_table(6)
    for kl, v in bp.entries.items():
        assert bt[kl] == pytest.approx((2j * math.pi) ** sum(kl) * v, rel=1e-14)


def test_prime_zeta_route_matches_sieve():
    check = coeffs.crosscheck_prime_sums(6, 10**5)
    assert check["ok"]


def test_matched_table_differs_but_keeps_structure():
    s = primes.sigma_T(0.3, 1e6)
    m = coeffs.d_table(8, sigma=s)
    assert m[(0, 0)] == 1.0
    assert abs(m[(3, 0)]) < abs(coeffs.d_table(8)[(3, 0)])
    assert m.params["sigma"] == s


def test_decay_check(d12):
    rep = coeffs.d_decay_check(d12, delta3=0.3)
    assert rep["bounded"]


def test_validation():
    with pytest.raises(DomainError):
        coeffs.b_prime_table(2)
    with pytest.raises(DomainError):
        CoeffTable("zz", 1, {})
    with pytest.raises(PrecisionError):
        CoeffTable("d", 1, {(0, 0): float("nan")})
    with pytest.raises(PrecisionError):
        coeffs.b_prime_table(8, tol=1e-30)
    with pytest.raises(DomainError):
        ExpansionParams.build(0.6, 1e6)
    assert coeffs.DEFAULT_DELTA3 < coeffs.DELTA3_SUP


def test_headline_params():
    p = ExpansionParams.build(0.3, 1e6)
    assert p.sigma_T == pytest.approx(0.9548727477861769, abs=1e-15)
    assert p.psi == pytest.approx(0.5249027713217432, abs=1e-13)
    assert np.isfinite(p.psi_tail_bound)


def test_b_prime_12_formula_and_symmetry():
    from zetaclt.series import neglog_power_coeffs

    bp = coeffs.b_prime_table(6)
    assert bp[(2, 1)] == bp[(1, 2)]
    assert all(k + l >= 3 for k, l in bp.entries)
    c2 = neglog_power_coeffs(2, 60).coeffs
    # b_{1,2}(p^-1/2) = sum_n c_2(n)/n p^-n, so the prime sum is sum_n c_2(n)/n P(n)
    total = math.fsum(c2[n] / n * primes.prime_zeta(float(n)).value for n in range(2, 61))
    assert bp[(1, 2)] == pytest.approx(total / (2**3 * 2), rel=1e-12)


def test_decay_check_trivial():
    rep = coeffs.d_decay_check(coeffs.d_table(0))
    assert rep["rows"] == [{"m": 0, "value": 1.0}]
    rep = coeffs.d_decay_check(coeffs.d_table(8))
    assert rep["rows"][1]["value"] == 0.0 and rep["rows"][2]["value"] == 0.0


def test_prime_limit_cross_check_changes_nothing():
    a = coeffs.d_table(8, prime_limit=10**5)
    b = coeffs.d_table(8, prime_limit=10**6)
    for kl, v in a.entries.items():
        assert abs(v - b.entries[kl]) <= max(a.tail_bound, b.tail_bound)
