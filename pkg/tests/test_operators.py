import math

import numpy as np
import pytest

from varlp.exponents import constant
from varlp.geometry import PseudoBall
from varlp.operators import (OperatorConfig, ball_averages, bergman_corpus,
                             jones_factorize, maximal_boundary, maximal_full,
                             mean_value_probe, operator_norm_estimate,
                             rdf_iterate_R, regularize, s_operators,
                             twin_ball)
from varlp.quadrature import GridField, GridSpec, MeasureParams
from varlp.weights import constant_weight, power_weight


def unit_field(grid):
    return GridField(grid, np.ones(grid.size))


def test_operator_config_validation():
    with pytest.raises(ValueError):
        OperatorConfig(k=1.5)
    with pytest.raises(ValueError):
        OperatorConfig(K=0)
    assert OperatorConfig().k == 0.25


def test_maximal_preserves_unit(ctx, grid, family):
    out = maximal_boundary(unit_field(grid), family, grid)
    covered = out.values > 0.0
    assert np.any(covered)
    assert np.max(np.abs(out.values[covered] - 1.0)) <= 1e-10


def test_maximal_sublinear(ctx, grid, family, rng):
    f = np.abs(rng.standard_normal(grid.size))
    g = np.abs(rng.standard_normal(grid.size))
    mf = maximal_boundary(GridField(grid, f), family, grid).values
    mg = maximal_boundary(GridField(grid, g), family, grid).values
    mfg = maximal_boundary(GridField(grid, f + g), family, grid).values
    assert np.all(mfg <= mf + mg + 1e-12)


def test_full_dominates_boundary(ctx, grid, rng):
    fam_b = ctx.family()
    fam_all = ctx.family(class_b_only=False)
    f = GridField(grid, np.abs(rng.standard_normal(grid.size)))
    mb = maximal_boundary(f, fam_b, grid).values
    ma = maximal_full(f, fam_all, grid).values
    # the unfiltered family contains every boundary-touching ball
    assert np.all(mb <= ma + 1e-12)


def test_ball_averages_of_indicator(ctx, grid, family):
    avgs = ball_averages(unit_field(grid), family, grid)
    live = ~np.isnan(avgs)
    assert np.any(live)
    assert np.max(np.abs(avgs[live] - 1.0)) <= 1e-12


def test_regularize_unit_and_linearity(grid, rng):
    out = regularize(unit_field(grid), 0.25, grid)
    assert np.max(np.abs(out.values - 1.0)) <= 1e-10
    f = rng.standard_normal(grid.size)
    g = rng.standard_normal(grid.size)
    rf = regularize(GridField(grid, f), 0.25, grid).values
    rg = regularize(GridField(grid, g), 0.25, grid).values
    rfg = regularize(GridField(grid, 2.0 * f - g), 0.25, grid).values
    assert np.allclose(rfg, 2.0 * rf - rg, atol=1e-12)


def test_mean_value_probe_oracle():
    for r in (0.3, 0.6):
        value, spread = mean_value_probe(r, MeasureParams(1, 1.0),
                                         GridSpec(), count=50, seed=3)
        assert value == pytest.approx(math.pi * r * r, rel=1e-3)
        assert spread <= 1e-3


def test_bergman_corpus_positive(grid, rng):
    mats = np.abs(rng.standard_normal((3, grid.size)))
    out = bergman_corpus(mats, grid, positive=True)
    assert out.shape == mats.shape
    assert np.all(out >= -1e-14)
    # linearity across corpus rows
    combo = bergman_corpus(mats[:1] * 2.0, grid, positive=True)
    assert np.allclose(combo[0], 2.0 * out[0], rtol=1e-12)


def test_twin_ball_same_radius():
    ball = PseudoBall((0.9,), 0.2)
    mate = twin_ball(ball, 1.0)
    assert mate.radius == ball.radius
    assert abs(mate.center_modulus - ball.center_modulus) <= 1e-12
    assert mate.center != ball.center
    with pytest.raises(ValueError):
        twin_ball(PseudoBall((0.0,), 0.2), 1.0)


def test_rdf_series_majorizes(ctx, grid, family, rng):
    h = GridField(grid, np.abs(rng.standard_normal(grid.size)))
    res = rdf_iterate_R(h, family, grid, K=6, Mhat=2.0)
    assert np.all(res.values >= np.abs(h.values) - 1e-12)
    assert res.K == 6
    assert res.tail_ratio >= 0.0


def test_s_operators_positive(ctx, grid, family, rng):
    s1, s2 = s_operators(power_weight(0.5), 2.0, family, grid)
    f = np.abs(rng.standard_normal(grid.size))
    assert np.all(s1(f) >= 0.0)
    assert np.all(s2(f) >= 0.0)


def test_factorize_unit_weight(ctx, grid, family):
    h = GridField(grid, np.ones(grid.size))
    res = jones_factorize(constant_weight(1.0), 2.0, h, family, grid, K=4,
                          Mhat=2.0)
    assert res.identity_max_rel_err <= 1e-10
    lo, hi = res.b1_bounds()
    assert lo > 1.0 and hi > 1.0
    assert res.p0 == 2.0


def test_operator_norm_estimate_requires_fields(grid):
    with pytest.raises(ValueError):
        operator_norm_estimate(lambda f: f, constant(2.0), grid, [])
    zero = GridField(grid, np.zeros(grid.size), label="z")
    with pytest.raises(ValueError):
        operator_norm_estimate(lambda f: f, constant(2.0), grid, [zero])


def test_operator_norm_estimate_identity(grid):
    fields = [GridField(grid, grid.radii ** a, label=f"r^{a}")
              for a in (0.5, 1.0)]
    est = operator_norm_estimate(lambda f: f, constant(2.0), grid, fields)
    assert est.value == pytest.approx(1.0, rel=1e-9)
    assert est.argmax_label in est.ratios
