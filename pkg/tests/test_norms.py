import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varlp.exponents import constant, radial_sin
from varlp.norms import (constant_p_norm, holder_product_bound,
                         luxemburg_norm, modular, pairing,
                         subordinate_norm_lb)
from varlp.quadrature import GridField
from varlp.weights import constant_weight, power_weight


def radial_field(grid, a):
    return GridField(grid, grid.radii ** a, label=f"|z|^{a:g}")


def test_unit_field_closed_form(grid):
    # ||1||_p = mu_alpha(ball)^{1/p} for constant p
    for p0 in (1.5, 2.0, 4.0):
        res = luxemburg_norm(GridField(grid, np.ones(grid.size)),
                             constant(p0), grid)
        assert res.value == pytest.approx(math.pi ** (1.0 / p0), rel=1e-9)
        assert res.iterations == 0  # closed-form constant-exponent path


def test_power_field_closed_form(grid):
    # || |z|^a ||_2 = sqrt(pi/(a+1)) on the unweighted disk
    for a in (0.5, 1.0, 2.0):
        res = luxemburg_norm(radial_field(grid, a), constant(2.0), grid)
        assert res.value == pytest.approx(math.sqrt(math.pi / (a + 1.0)),
                                          rel=1e-9)


def test_modular_at_value_variable_exponent(grid):
    res = luxemburg_norm(radial_field(grid, 0.5), radial_sin(), grid,
                         tol=1e-10)
    assert res.converged
    assert res.modular_at_value == pytest.approx(1.0, abs=1e-8)
    assert res.iterations > 0


def test_constant_p_norm_agreement(grid):
    w = power_weight(0.5)
    lux = luxemburg_norm(radial_field(grid, 1.0), constant(3.0), grid,
                         weight=w)
    closed = constant_p_norm(radial_field(grid, 1.0), 3.0, grid, weight=w)
    assert lux.value == pytest.approx(closed, rel=1e-12)


@given(st.floats(min_value=-6.0, max_value=6.0))
def test_homogeneity(grid, log_c):
    c = 10.0 ** (log_c / 2.0)
    f = radial_field(grid, 0.5)
    scaled = GridField(grid, c * f.values)
    base = luxemburg_norm(f, radial_sin(), grid, tol=1e-11).value
    assert luxemburg_norm(scaled, radial_sin(), grid,
                          tol=1e-11).value == pytest.approx(c * base,
                                                            rel=1e-7)


def test_zero_and_infinite_fields(grid):
    zero = luxemburg_norm(GridField(grid, np.zeros(grid.size)),
                          radial_sin(), grid)
    assert zero.value == 0.0 and zero.converged
    bad = luxemburg_norm(GridField(grid, np.full(grid.size, np.inf)),
                         radial_sin(), grid)
    assert bad.value == np.inf and bad.converged


def test_max_doublings_cap(grid):
    huge = GridField(grid, np.full(grid.size, 1e8))
    res = luxemburg_norm(huge, radial_sin(), grid, max_doublings=3)
    assert not res.converged


def test_sandwich_inequality(grid, rng):
    p = radial_sin()
    pv = p(grid.points)
    pmin, pmax = float(np.min(pv)), float(np.max(pv))
    for _ in range(10):
        f = GridField(grid, np.abs(rng.standard_normal(grid.size)) + 0.01)
        nrm = luxemburg_norm(f, p, grid).value
        rho = modular(f, p, grid)
        lo = min(rho ** (1.0 / pmin), rho ** (1.0 / pmax))
        hi = max(rho ** (1.0 / pmin), rho ** (1.0 / pmax))
        assert lo * (1.0 - 1e-8) <= nrm <= hi * (1.0 + 1e-8)


def test_holder_with_factor_two(grid, rng):
    p = radial_sin()
    w = power_weight(0.5)
    for _ in range(5):
        f = GridField(grid, rng.standard_normal(grid.size))
        g = GridField(grid, rng.standard_normal(grid.size))
        lhs, rhs = holder_product_bound(f, g, p, grid, weight=w)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_pairing_bilinear(grid, rng):
    f = rng.standard_normal(grid.size)
    g = rng.standard_normal(grid.size)
    assert pairing(2.0 * f, g, grid) == pytest.approx(
        2.0 * pairing(f, g, grid), rel=1e-12)


def test_region_restriction_shrinks_norm(grid):
    from varlp.geometry import PseudoBall

    ball = PseudoBall((0.0,), 0.5)
    p = radial_sin()
    f = radial_field(grid, 0.5)
    full = luxemburg_norm(f, p, grid).value
    part = luxemburg_norm(f, p, grid, region=ball).value
    assert 0.0 < part <= full * (1.0 + 1e-12)


def test_subordinate_is_lower_bound(ctx):
    grid = ctx.grid()
    p = radial_sin()
    w = constant_weight(1.0)
    dual = ctx.dual_corpus(p, w)
    f = GridField(grid, grid.radii ** 0.5)
    lb = subordinate_norm_lb(f, p, w, dual, grid)
    nrm = luxemburg_norm(f, p, grid, weight=w).value
    assert lb <= nrm * (1.0 + 1e-9)
    assert lb > 0.0
    with pytest.raises(ValueError):
        subordinate_norm_lb(f, p, w, [], grid)
