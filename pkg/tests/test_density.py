import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetaclt.coeffs import ExpansionParams
from zetaclt.density import (
    DensityModel,
    Rectangle,
    density_F,
    density_grid,
    density_truncation_budget,
    normalized_to_raw,
    raw_to_normalized,
    rect_probability,
    rect_probability_detail,
    rect_truncation_budget,
    rectangle_panel,
)
from zetaclt.errors import DomainError, OrderError


@pytest.fixture(scope="module")
def params():
    return ExpansionParams.build(0.3, 1e6, 8)


@pytest.fixture(scope="module")
def model(params):
    return DensityModel.build(params)


def test_full_plane_is_one(model):
    assert rect_probability(model, Rectangle.plane()) == pytest.approx(1.0, abs=1e-15)


def test_gaussian_quadrant(params):
    m0 = DensityModel.build(ExpansionParams.build(0.3, 1e6, 0))
    assert rect_probability(m0, rectangle_panel()["Q1"]) == 0.25


def test_degenerate_is_zero(model):
    assert rect_probability(model, Rectangle(0.4, 0.4, -1, 1)) == 0.0


def test_correction_bound(model):
    for rect in list(rectangle_panel().values()) + [Rectangle(-0.2, 0.9, -1.3, 0.1)]:
        r = rect_probability_detail(model, rect)
        assert abs(r.value - r.gaussian_leading_term) <= r.correction_bound + 1e-15


def test_quadrant_symmetries(model):
    p = {k: rect_probability(model, r) for k, r in rectangle_panel().items()}
    assert p["Q1"] == pytest.approx(p["Q4"], abs=1e-15)
    assert p["Q2"] == pytest.approx(p["Q3"], abs=1e-15)
    assert sum(p[q] for q in ("Q1", "Q2", "Q3", "Q4")) == pytest.approx(1.0, abs=1e-14)


def test_density_integrates_to_rect_probability(model):
    from numpy.polynomial.legendre import leggauss

    s = math.sqrt(math.pi * model.psi)
    x, w = leggauss(80)
    a, b, c, d = -0.7, 1.2, -0.4, 0.9
    X, Y = np.meshgrid((0.5 * (b - a) * x + 0.5 * (a + b)) * s, (0.5 * (d - c) * x + 0.5 * (c + d)) * s, indexing="ij")
    W = np.outer(w, w) * 0.25 * (b - a) * (d - c) * s * s
    quad = float(np.sum(W * density_F(model, X, Y)))
    assert quad == pytest.approx(rect_probability(model, Rectangle(a, b, c, d)), abs=1e-12)


def test_D0_is_gaussian():
    m0 = DensityModel.build(ExpansionParams.from_psi(0.4, 0))
    v = density_F(m0, 0.1, 0.2)
    assert v == pytest.approx(math.exp(-0.05 / 0.4) / (math.pi * 0.4), rel=1e-15)


def test_grid_shape(model):
    g = density_grid(model, [0, 0.1, 0.2], [0, 0.5])
    assert g.shape == (6, 3)


def test_budgets_positive(model):
    assert density_truncation_budget(model, 0.0, 0.0) > 0
    assert rect_truncation_budget(model, rectangle_panel()["Q1"]) > 0


def test_rectangle_parsing():
    r = Rectangle.parse("-inf, 0, 1e-1, inf")
    assert r.as_tuple() == (-math.inf, 0.0, 0.1, math.inf)
    with pytest.raises(OrderError):
        Rectangle(1, 0, 0, 1)
    with pytest.raises(DomainError):
        Rectangle.parse("1,2,3")
    with pytest.raises(DomainError):
        Rectangle(float("nan"), 0, 0, 1)


def test_scaling_roundtrip():
    r = Rectangle(-1, 2, 0.5, 3)
    back = raw_to_normalized(normalized_to_raw(r, 0.6), 0.6)
    assert np.allclose(back.as_tuple(), r.as_tuple(), rtol=1e-15)


def test_with_degree_limits(model):
    with pytest.raises(DomainError):
        model.with_degree(20)
    assert model.with_degree(4).degree == 4


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_mirror_invariance(a, b, c, d):
    m = DensityModel.build(ExpansionParams.build(0.3, 1e6, 8))
    r = Rectangle(min(a, b), max(a, b), min(c, d), max(c, d))
    assert rect_probability(m, r) == pytest.approx(rect_probability(m, r.mirror_y()), abs=1e-13)


def test_gaussian_at_origin_psi_one():
    m = DensityModel.build(ExpansionParams.from_psi(1.0, 0))
    assert density_F(m, 0.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)


def test_normalization_every_degree(params):
    for D in range(0, 13):
        m = DensityModel.build(ExpansionParams.build(0.3, 1e6, D))
        assert rect_probability(m, Rectangle.plane()) == 1.0


def test_normalized_to_raw_examples():
    unit = Rectangle(0, 1, 0, 1)
    assert normalized_to_raw(unit, 1 / math.pi).as_tuple() == pytest.approx(unit.as_tuple(), abs=1e-15)
    assert normalized_to_raw(unit, 1.0).as_tuple() == pytest.approx((0, math.sqrt(math.pi), 0, math.sqrt(math.pi)), abs=1e-15)


def test_monotone_refinement(params):
    m = DensityModel.build(ExpansionParams.build(0.3, 1e6, 8))
    r = Rectangle(0, 1, 0, 1)
    three = rect_probability_detail(m.with_degree(3), r)
    deg3 = abs(math.fsum(v for (k, l), v in three.terms.items() if k + l == 3))
    for D in range(4, 9):
        assert abs(rect_probability(m.with_degree(D), r) - three.value) <= 2 * deg3


def test_negative_flag(model):
    from zetaclt.density import density_flags

    assert density_flags([0.1, -1e-9]) == ["negative_density"]
    assert density_flags([0.1]) == []
