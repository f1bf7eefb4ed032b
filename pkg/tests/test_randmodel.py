import math

import numpy as np
import pytest

from zetaclt import primes, randmodel
from zetaclt.density import Rectangle
from zetaclt.errors import DomainError, PrecisionError
from zetaclt.randmodel import EmpiricalMeasure, FourierGrid, RandomEulerConfig

SIGMA = primes.sigma_T(0.3, 1e6)


@pytest.fixture(scope="module")
def cloud():
    return randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 1000, 40000, seed=3))


def test_config_validation():
    with pytest.raises(DomainError):
        RandomEulerConfig(0.5, 100, 10)
    with pytest.raises(DomainError):
        RandomEulerConfig(1.2, 100, 10)
    with pytest.raises(DomainError):
        RandomEulerConfig(0.9, -1, 10)
    with pytest.raises(DomainError):
        RandomEulerConfig(0.9, 100, 10, tail_budget=1e-12)


def test_moments(cloud):
    mean, se = cloud.mean()
    assert abs(mean.real) <= 4 * se.real and abs(mean.imag) <= 4 * se.imag
    # E|L|^2 over the sampled primes is the truncated psi
    target = primes.psi_direct(SIGMA, 1000).value
    second = float(np.mean(np.abs(cloud.samples) ** 2))
    assert second == pytest.approx(target, rel=0.03)
    assert float(np.var(cloud.samples.real)) == pytest.approx(target / 2, rel=0.04)


def test_reproducible_and_chunk_free(cloud):
    cfg = RandomEulerConfig(SIGMA, 1000, 40000, seed=3)
    again = randmodel.sample_log_zeta_random(cfg, chunk=4096)
    assert np.array_equal(again.samples, cloud.samples)
    other = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 1000, 40000, seed=4))
    assert not np.array_equal(other.samples, cloud.samples)


def test_seed_self_test(cloud):
    other = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 1000, 40000, seed=99))
    psi = primes.psi_sigma(SIGMA).value
    for rect in (Rectangle(0, math.inf, 0, math.inf), Rectangle(-1, 1, -1, 1)):
        a, ea = cloud.rect_probability(rect, psi)
        b, eb = other.rect_probability(rect, psi)
        assert abs(a - b) <= 6 * math.hypot(ea, eb)


def test_prefix_property():
    small = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 500, 100, seed=5))
    big = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 500, 300, seed=5))
    assert np.array_equal(small.samples, big.samples[:100])


def test_save_load(tmp_path, cloud):
    for fmt in ("csv", "bin"):
        p = str(tmp_path / f"s.{fmt}")
        sub = EmpiricalMeasure(cloud.samples[:500], cloud.seed, cloud.header)
        sub.save(p, fmt)
        back = EmpiricalMeasure.load(p)
        assert np.array_equal(back.samples, sub.samples)
        assert back.seed == sub.seed and back.header["source"] == "random-model"
    with pytest.raises(DomainError):
        sub.save(str(tmp_path / "x"), "xml")


def test_empirical_edge_cases(cloud):
    assert cloud.rect_probability(Rectangle(0.2, 0.2, -1, 1), 0.5) == (0.0, 0.0)
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.zeros(0, complex), 1).rect_probability(Rectangle(0, 1, 0, 1), 0.5)


def test_tail_budget_small():
    std = randmodel.omitted_tail_std(SIGMA, 10**4)
    assert 0 < std < 0.02
    assert randmodel.tail_rect_budget(std, 0.52) < 2e-4


@pytest.mark.parametrize("w", [0.0, 0.3, 0.7071])
@pytest.mark.parametrize("uv", [(0.4, -0.2), (1.3, 0.8)])
def test_J_quadrature_vs_series(w, uv):
    q = randmodel.J_quadrature(*uv, w)
    s, tail = randmodel.J_series(*uv, w, D=24)
    assert abs(q - s) <= tail + 1e-11


def test_J_domain():
    with pytest.raises(DomainError):
        randmodel.J_quadrature(0.1, 0.1, 1.0)
    with pytest.raises(DomainError):
        randmodel.J_quadrature(0.1, 0.1, 0.5, nodes=8)


def test_phi_rand_is_product_of_J():
    u, v, P = 0.35, -0.2, 60
    ps = primes.cached_primes(P)
    prod = np.prod([randmodel.J_quadrature(math.pi * u, math.pi * v, float(p) ** -SIGMA) for p in ps])
    tail = primes.psi_sigma(SIGMA).value - primes.psi_direct(SIGMA, P).value
    ref = prod * math.exp(-(math.pi**2) * (u * u + v * v) * tail)
    got = complex(randmodel.phi_rand(np.array([u]), np.array([v]), SIGMA, P)[0])
    assert abs(got - ref) <= 1e-12


def test_log_J_residuals_shrink_with_T():
    res = []
    for T in (1e4, 1e8, 1e16):
        s = primes.sigma_T(0.3, T)
        res.append(randmodel.log_J_vs_expansion(0.06, 0.05, s, 2000, 8))
    assert res[0] > res[1] > res[2]


def test_characteristic_grid_small():
    grid = FourierGrid(step=0.15, prime_limit=300)
    psi = primes.psi_sigma(SIGMA).value
    cg = randmodel.CharacteristicGrid(SIGMA, psi, grid)
    assert cg.hermitian_defect() <= 1e-13
    assert abs(cg.at(0, 0) - 1) <= 1e-14
    # the grid step makes the inversion periodic with period 1/step, so stay inside half a period
    assert cg.box_mass(3.0) == pytest.approx(1.0, abs=1e-6)
    assert cg.imag_residue(0.2, -0.3) <= 1e-12
    with pytest.raises(PrecisionError):
        randmodel.CharacteristicGrid(SIGMA, psi, FourierGrid(step=0.15, radius=0.5, prime_limit=300))


def test_required_radius_grows_with_cutoff():
    assert randmodel.required_radius(0.5, 1e-14) > randmodel.required_radius(0.5, 1e-8)


def test_empty_product_is_zero():
    m = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 0, 50))
    assert np.all(m.samples == 0)


def test_moments_at_scale():
    N = 10**6
    m = randmodel.sample_log_zeta_random(RandomEulerConfig(SIGMA, 1000, N, seed=8))
    target = 0.5 * primes.psi_direct(SIGMA, 1000).value
    for comp in (m.samples.real, m.samples.imag):
        assert abs(comp.mean()) <= 4 * comp.std() / math.sqrt(N)
        sq = (comp - comp.mean()) ** 2
        assert abs(sq.mean() - target) <= 4 * sq.std() / math.sqrt(N)


def test_plane_and_mirror(cloud):
    psi = primes.psi_sigma(SIGMA).value
    assert cloud.rect_probability(Rectangle.plane(), psi) == (1.0, 0.0)
    r = Rectangle(-0.3, 0.8, 0.1, 1.2)
    a, ea = cloud.rect_probability(r, psi)
    b, eb = cloud.rect_probability(r.mirror_y(), psi)
    assert abs(a - b) <= 4 * math.hypot(ea, eb)


def test_J_trivial_values_and_bound():
    assert randmodel.J_quadrature(0, 0, 0.6) == pytest.approx(1, abs=1e-15)
    assert randmodel.J_quadrature(1.3, -0.4, 0.0) == pytest.approx(1, abs=1e-15)
    rng = np.random.default_rng(2)
    for _ in range(30):
        u, v = rng.uniform(-5, 5, 2)
        w = rng.uniform(0, 0.95)
        assert abs(randmodel.J_quadrature(u, v, w)) <= 1 + 1e-12


def test_log_J_zero_and_degree():
    assert randmodel.log_J_vs_expansion(0.0, 0.0, SIGMA, 100, 8) == 0.0
    r = [randmodel.log_J_vs_expansion(0.05, 0.04, SIGMA, 500, D) for D in (4, 6, 8, 10, 12)]
    # the expansion side carries sigma = 1/2 prime sums, so the residual settles on
    # the sigma mismatch; past that floor each D -> D+2 step changes it less
    steps = [abs(b - a) for a, b in zip(r, r[1:])]
    assert all(b < 0.1 * a for a, b in zip(steps, steps[1:]))
    assert r[-1] <= 2e-3


def test_product_truncation_stability():
    u = np.array([0.1, 0.3, 0.6])
    v = np.array([0.05, -0.2, 0.4])
    a = randmodel.phi_rand(u, v, SIGMA, 1000)
    b = randmodel.phi_rand(u, v, SIGMA, 10000)
    # beyond the Gaussian factor each omitted prime contributes O(|pi z|^3 p^-3 sigma)
    r = np.pi * np.hypot(u, v)
    bound = 4 * r**3 * primes.prime_tail_bound(1000, 3 * SIGMA) * np.exp(r**2)
    assert np.all(np.abs(a - b) <= bound)
