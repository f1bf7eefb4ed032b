import os
import subprocess
import sys

import numpy as np
import pytest

from zetaclt import _arith, _backend, _fallback, primes

pytestmark = pytest.mark.skipif(_backend.NAME != "compiled", reason="compiled extension not built")


def test_sample_euler_parity():
    ps = primes.cached_primes(3000)
    a = _backend.get("compiled").sample_euler(0.9, ps, 11, 17, 2000)
    b = _fallback.sample_euler(0.9, ps, 11, 17, 2000)
    assert np.max(np.abs(a - b)) <= 1e-12


@pytest.mark.parametrize("t,sigma0,h,nsig,N", [(1234.5, 0.8, 0.0, 1, 5000), (2e6, 0.95, 0.1, 7, 40000), (3e3, 0.6, 0.05, 70, 3000)])
def test_dirichlet_parity(t, sigma0, h, nsig, N):
    a = _backend.get("compiled").dirichlet_multi(t, sigma0, h, nsig, N)
    b = _fallback.dirichlet_multi(t, sigma0, h, nsig, N)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_dirichlet_small_direct():
    n = np.arange(1, 200, dtype=float)
    s = complex(0.7, 55.0)
    ref = np.sum(n ** -s)
    for kern in (_backend.get("compiled"), _fallback):
        assert abs(kern.dirichlet_multi(55.0, 0.7, 0.0, 1, 200)[0] - ref) <= 1e-12


def test_char_fn_grid_parity():
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=50), rng.normal(size=50)
    re, im = rng.normal(size=64), rng.normal(size=64)
    a = _backend.get("compiled").char_fn_grid(u, v, re, im)
    b = _fallback.char_fn_grid(u, v, re, im)
    assert np.max(np.abs(a - b)) <= 1e-13


def test_env_forces_fallback():
    env = dict(os.environ, ZETACLT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from zetaclt import _backend; print(_backend.NAME)"], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_prime_phase_accuracy():
    import mpmath

    t = 9.87654321e6
    ps, hi, lo = _arith.prime_logs(1000)
    got = _arith.reduce_angle(t, hi, lo)
    with mpmath.workdps(40):
        for p, g in zip(ps[::17], got[::17]):
            x = mpmath.mpf(t) * mpmath.log(int(p))
            r = float(x - 2 * mpmath.pi * mpmath.nint(x / (2 * mpmath.pi)))
            assert abs(((g - r) + np.pi) % (2 * np.pi) - np.pi) <= 1e-12


def test_two_prod_exact():
    from fractions import Fraction

    a, b = 1.2345678901234567e6, 3.3333333333333335
    p, e = _arith.two_prod(a, b)
    assert Fraction(float(p)) + Fraction(float(e)) == Fraction(a) * Fraction(b)


def test_omega_levels_cover_composites():
    lv = _arith.omega_levels(500)
    comp = np.sort(np.concatenate(lv))
    spf = _arith.spf_table(500)
    ref = [n for n in range(4, 500) if spf[n] != n]
    assert list(comp) == ref
