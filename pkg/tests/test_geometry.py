import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varlp.geometry import (MAX_RADIUS, PseudoBall, boundary_curve_points,
                            distance_to, enumerate_ball_family,
                            pairwise_distance, pseudo_distance,
                            regularization_ball, sample_points, widened_k)

moduli = st.floats(min_value=1e-6, max_value=0.999999)
angles = st.floats(min_value=0.0, max_value=2.0 * np.pi)


def disk_point(r, t):
    return r * np.exp(1j * t)


@given(moduli, angles, moduli, angles)
def test_symmetry(r1, t1, r2, t2):
    z, w = disk_point(r1, t1), disk_point(r2, t2)
    assert pseudo_distance(z, w) == pytest.approx(pseudo_distance(w, z),
                                                 abs=1e-14)


@given(moduli, angles)
def test_self_distance_zero(r, t):
    z = disk_point(r, t)
    assert pseudo_distance(z, z) <= 1e-14


@given(moduli, angles, moduli, angles)
def test_range(r1, t1, r2, t2):
    d = pseudo_distance(disk_point(r1, t1), disk_point(r2, t2))
    assert 0.0 <= d < MAX_RADIUS


@given(moduli, angles, moduli, angles, moduli, angles)
def test_quasi_triangle_constant_two(r1, t1, r2, t2, r3, t3):
    z = disk_point(r1, t1)
    w = disk_point(r2, t2)
    v = disk_point(r3, t3)
    lhs = pseudo_distance(z, w)
    rhs = 2.0 * (pseudo_distance(z, v) + pseudo_distance(v, w))
    assert lhs <= rhs * (1.0 + 1e-12) + 1e-15


def test_origin_branch():
    # near the origin the inner-product term is ill-conditioned; the
    # distance degrades to the modulus sum there
    assert pseudo_distance(0.0, 0.5) == pytest.approx(0.5, abs=1e-14)
    assert pseudo_distance(1e-16, 0.5) == pytest.approx(0.5, abs=1e-14)


def test_distance_to_matches_scalar(rng):
    pts = sample_points(200, rng, n=2)
    center = pts[0]
    vec = distance_to(center, pts)
    for i in range(0, 200, 17):
        assert vec[i] == pytest.approx(pseudo_distance(center, pts[i]),
                                       abs=1e-13)


def test_pairwise_matches_scalar(rng):
    a = sample_points(64, rng, n=1)
    b = sample_points(64, rng, n=1)
    vec = pairwise_distance(a, b)
    for i in range(0, 64, 7):
        assert vec[i] == pytest.approx(pseudo_distance(a[i], b[i]),
                                       abs=1e-13)


def test_touches_boundary_rule():
    assert not PseudoBall((0.2,), 0.5).touches_boundary()
    assert PseudoBall((0.6,), 0.5).touches_boundary()
    # strict inequality at the threshold radius = 1 - |center|
    assert not PseudoBall((0.5,), 0.5).touches_boundary()


def test_contains_matches_distance(rng):
    ball = PseudoBall((0.4 + 0.1j,), 0.3)
    pts = sample_points(500, rng, n=1)
    mask = ball.contains(pts)
    dist = distance_to(ball.center_array, pts)
    assert np.array_equal(mask, dist < ball.radius)


def test_boundary_curve_interior_ball_exact():
    ball = PseudoBall((0.3 + 0.2j,), 0.25)
    assert not ball.touches_boundary()
    pts = boundary_curve_points(ball, count=128)
    d = distance_to(ball.center_array, pts)
    assert np.max(np.abs(d - ball.radius)) <= 1e-12


def test_boundary_curve_clipped_stays_inside():
    ball = PseudoBall((0.9,), 0.5)
    assert ball.touches_boundary()
    pts = boundary_curve_points(ball, count=128)
    assert np.all(np.sqrt(np.sum(np.abs(pts) ** 2, axis=1)) < 1.0)
    d = distance_to(ball.center_array, pts)
    assert np.max(d) <= ball.radius * (1.0 + 1e-9)


def test_family_all_touch_boundary(family):
    assert len(family.balls) > 0
    for ball in family:
        assert ball.touches_boundary()
        assert ball.radius > 1.0 - ball.center_modulus


def test_family_refinement_grows(family):
    refined = enumerate_ball_family(family.descriptor.refined())
    assert len(refined.balls) > len(family.balls)


def test_sample_points_in_ball(rng):
    for n in (1, 2):
        pts = sample_points(1000, rng, n=n)
        r = np.sqrt(np.sum(np.abs(pts) ** 2, axis=1))
        assert np.all(r < 1.0)
        assert np.all(r > 0.0)


def test_regularization_ball_interior():
    ball = regularization_ball(np.array([0.8]), 0.25)
    assert not ball.touches_boundary()
    assert ball.radius == pytest.approx(0.25 * 0.2)
    with pytest.raises(ValueError):
        regularization_ball(np.array([1.2]), 0.25)


def test_widened_scale():
    assert widened_k(0.25) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        widened_k(0.5)


def test_invalid_radius():
    with pytest.raises(ValueError):
        PseudoBall((0.1,), 0.0)
