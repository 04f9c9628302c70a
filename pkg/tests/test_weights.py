import numpy as np
import pytest

from varlp.exponents import constant
from varlp.geometry import PseudoBall
from varlp.harness import resolve_weight
from varlp.quadrature import GridField
from varlp.weights import (angular_weight, b1_constant, bekolle_constant,
                           bplus_constant, constant_weight, doubling_ratio,
                           dual_weight, grid_weight, lambda_class_fit,
                           lambda_violations, muckenhoupt_constant,
                           per_ball_mixed, per_ball_product, power_weight,
                           product_weight, weight_power_fraction)


def test_unit_weight_constants(ctx, family):
    one = constant_weight(1.0)
    rep = bekolle_constant(one, constant(2.0), family, ctx.patch_cache)
    assert rep.estimate == pytest.approx(1.0, abs=1e-12)
    b1 = b1_constant(one, family, ctx.grid())
    assert b1.estimate == pytest.approx(1.0, abs=1e-9)


def test_report_serialization(ctx, family):
    rep = bekolle_constant(power_weight(0.5), constant(2.0), family,
                           ctx.patch_cache)
    doc = rep.to_dict()
    assert set(doc) >= {"class", "estimate", "argmax_ball", "family",
                        "grid", "per_ball_csv_path"}
    assert doc["grid"] == {"route": "patch"}
    assert doc["argmax_ball"]["touches_boundary"] is True


def test_per_ball_csv(tmp_path, ctx, family):
    rep = bekolle_constant(power_weight(0.5), constant(2.0), family,
                           ctx.patch_cache)
    path = rep.write_per_ball_csv(tmp_path / "per_ball.csv")
    header = open(path).readline().strip().split(",")
    assert header == ["center_re", "center_im", "radius", "value"]
    assert rep.to_dict()["per_ball_csv_path"] == path


def test_dual_weight_involution(rng):
    w = power_weight(0.5)
    p = constant(3.0)
    wd = dual_weight(w, p)
    wdd = dual_weight(wd, p.conjugate())
    pts = rng.uniform(-0.6, 0.6, (50, 1)) + 1j * rng.uniform(-0.6, 0.6,
                                                             (50, 1))
    assert np.allclose(wdd(pts), w(pts), rtol=1e-10)


def test_mixed_is_square_of_product_at_p2(ctx):
    # at constant p = 2 the mixed average form equals the squared
    # norm-product form ball by ball
    w = power_weight(0.5)
    p = constant(2.0)
    for ball in (PseudoBall((0.6,), 0.5), PseudoBall((0.9,), 0.2)):
        prod = per_ball_product(w, p, ball, ctx.patch_cache)
        mixed = per_ball_mixed(w, p, ball, ctx.patch_cache)
        assert mixed == pytest.approx(prod ** 2, rel=5e-3)


def test_duality_symmetry(ctx, family):
    w = power_weight(0.5)
    p = constant(3.0)
    direct = bekolle_constant(w, p, family, ctx.patch_cache).estimate
    swapped = bekolle_constant(dual_weight(w, p), p.conjugate(), family,
                               ctx.patch_cache).estimate
    assert direct == pytest.approx(swapped, rel=1e-8)


def test_family_guards(ctx, family):
    full = ctx.family(class_b_only=False)
    w = constant_weight(1.0)
    p = constant(2.0)
    with pytest.raises(ValueError):
        muckenhoupt_constant(w, p, family, ctx.patch_cache)
    with pytest.raises(ValueError):
        bekolle_constant(w, p, full, ctx.patch_cache)
    rep = muckenhoupt_constant(w, p, full, ctx.patch_cache)
    assert rep.estimate >= 1.0 - 1e-12


def test_bplus_dominates_at_unit(ctx, family):
    w = constant_weight(2.0)
    p = constant(2.0)
    rep = bplus_constant(w, p, family, ctx.patch_cache)
    # constant weights cancel in the averaged ratio
    assert rep.estimate == pytest.approx(1.0, rel=1e-10)


def test_doubling_ratio_unit(ctx, family):
    assert doubling_ratio(constant_weight(1.0), family,
                          ctx.patch_cache) >= 1.0 - 1e-12


def test_lambda_law_unit_weight(ctx, family):
    fit = lambda_class_fit(constant_weight(1.0), family, ctx.grid(), seed=7)
    assert fit.violations == 0
    assert fit.C <= 1.0 + 1e-6
    viol, samples = lambda_violations(constant_weight(1.0), family,
                                      ctx.grid(), fit.C * 1.01, fit.delta,
                                      seed=11)
    assert samples > 0
    assert viol == 0


def test_weight_power_fraction(rng):
    w = power_weight(1.0)
    p = constant(2.0)
    pts = rng.uniform(0.1, 0.7, (20, 1)).astype(complex)
    frac = weight_power_fraction(w, p, +1)
    assert np.allclose(frac(pts), np.sqrt(w(pts)), rtol=1e-12)


def test_resolve_weight_names():
    assert resolve_weight("const1").name == "const1"
    assert resolve_weight("power+0.5").params["gamma"] == 0.5
    prod = resolve_weight("power+0.5*angular0.5")
    assert prod.name == "power+0.5*angular0.5"
    with pytest.raises(Exception):
        resolve_weight("mystery42")


def test_weight_positivity_validation(grid):
    from varlp.weights import Weight

    with pytest.raises(ValueError):
        angular_weight(2.0)  # amplitude would make the weight negative
    bad = Weight(name="neg", fn=lambda pts: -np.ones(pts.shape[0]))
    with pytest.raises(ValueError):
        bad(grid.points)
    assert product_weight(power_weight(0.5),
                          angular_weight(0.5)).name == "power+0.5*angular0.5"


def test_grid_weight_roundtrip(grid):
    vals = 1.0 + grid.radii
    w = grid_weight(GridField(grid, vals), name="sampled-test")
    assert np.allclose(w(grid.points), vals)
