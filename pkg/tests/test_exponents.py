import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varlp.exponents import (bounds_on, conjugate_value, constant,
                             exponent_corpus, harmonic_mean_exponent,
                             log_holder_estimate, mean_exponent, radial_sin)
from varlp.geometry import PseudoBall
from varlp.harness import resolve_exponent


def test_corpus_within_admissible_band():
    for p in exponent_corpus():
        assert 1.0 < p.p_minus <= p.p_plus < np.inf


@given(st.floats(min_value=1.0 + 1e-6, max_value=64.0))
def test_conjugate_involution(pv):
    assert conjugate_value(conjugate_value(pv)) == pytest.approx(pv,
                                                                 rel=1e-12)


@given(st.floats(min_value=1.0 + 1e-6, max_value=64.0))
def test_conjugate_identity(pv):
    q = conjugate_value(pv)
    assert 1.0 / pv + 1.0 / q == pytest.approx(1.0, abs=1e-12)


def test_constant_field_everywhere(grid):
    p = constant(2.5)
    vals = p(grid.points)
    assert np.all(vals == 2.5)
    assert p.is_constant
    assert p.conjugate()(grid.points[:5]) == pytest.approx(2.5 / 1.5)


def test_radial_sin_profile(grid):
    p = radial_sin()
    vals = p(grid.points)
    r = np.sqrt(np.sum(np.abs(grid.points) ** 2, axis=1))
    assert vals == pytest.approx(2.0 + np.sin(r))
    assert not p.is_constant


def test_bounds_on_radial_sin(ctx):
    # monotone radial profile: extremes at the center and the rim
    grid = ctx.grid()
    p = radial_sin()
    lo, hi = bounds_on(p, PseudoBall((0.0,), 3.0), grid)
    assert lo == pytest.approx(2.0, abs=5e-2)
    assert hi == pytest.approx(2.0 + np.sin(1.0), abs=1e-2)


def test_ball_mean_ordering(ctx):
    grid = ctx.grid()
    ball = PseudoBall((0.5,), 0.6)
    for p in exponent_corpus():
        lo, hi = bounds_on(p, ball, grid)
        hm = harmonic_mean_exponent(p, ball, grid)
        am = mean_exponent(p, ball, grid)
        assert lo - 1e-12 <= hm <= am + 1e-12
        assert am <= hi + 1e-12


def test_ball_mean_constant_exact(ctx):
    grid = ctx.grid()
    ball = PseudoBall((0.5,), 0.6)
    p = constant(3.0)
    assert harmonic_mean_exponent(p, ball, grid) == pytest.approx(3.0,
                                                                  rel=1e-12)
    assert mean_exponent(p, ball, grid) == pytest.approx(3.0, rel=1e-12)


def test_log_holder_constant_is_zero():
    assert log_holder_estimate(constant(2.0)) <= 1e-15


def test_log_holder_variable_positive():
    assert log_holder_estimate(radial_sin(), count=500) > 0.0


def test_resolve_exponent_names():
    assert resolve_exponent("const2").p_plus == 2.0
    assert resolve_exponent("2+sin|z|").p_plus > 2.0
    with pytest.raises(Exception):
        resolve_exponent("nonsense")
