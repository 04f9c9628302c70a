"""Pseudo-distance geometry on the unit ball of C^n.

The pseudo-distance between nonzero points is

    d(z, zeta) = ||z| - |zeta|| + |1 - <z, zeta> / (|z| |zeta|)|,

with <z, zeta> = sum_j z_j * conj(zeta_j), and d(z, zeta) = |z| + |zeta|
when either point has modulus below ``ORIGIN_EPS``.  It is symmetric,
vanishes on the diagonal, takes values in [0, 3), and satisfies the
quasi-triangle inequality d(z, zeta) <= 2*(d(z, xi) + d(xi, zeta)) away
from the origin branch.  (The constant-2 inequality genuinely fails when
the intermediate point sits exactly on the origin branch — the branch
formula drops all angular information — so samplers here keep moduli
above 1e-9.)

Pseudo-balls B(z, R) = {zeta : d(z, zeta) < R} intersected with the unit
ball are the basic regions.  A ball "touches the boundary" exactly when
R > 1 - |center| (strictly); the family of such balls is the class used
by the boundary maximal operator and the weight-class constants.
"""

from dataclasses import dataclass, field, replace

import numpy as np

ORIGIN_EPS = 1e-14

# Any radius >= 3 describes the whole ball already (d < 3 everywhere).
MAX_RADIUS = 3.0


def as_points(z):
    """Coerce scalars / sequences to a complex array of shape (N, n)."""
    a = np.asarray(z, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        # ambiguous: treat a 1-d array as N points in C^1
        a = a.reshape(-1, 1)
    return a


def pseudo_distance(z, zeta):
    """d(z, zeta) for single points (complex scalar or length-n vector)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    zeta = np.asarray(zeta, dtype=complex).reshape(-1)
    rz = np.sqrt(np.sum(np.abs(z) ** 2))
    rw = np.sqrt(np.sum(np.abs(zeta) ** 2))
    if rz < ORIGIN_EPS or rw < ORIGIN_EPS:
        return float(rz + rw)
    inner = np.sum(z * np.conj(zeta))
    return float(abs(rz - rw) + abs(1.0 - inner / (rz * rw)))


def distance_to(center, points):
    """Vectorized d(center, points) for points of shape (N, n)."""
    c = np.asarray(center, dtype=complex).reshape(-1)
    pts = as_points(points)
    rc = float(np.sqrt(np.sum(np.abs(c) ** 2)))
    rp = np.sqrt(np.sum(np.abs(pts) ** 2, axis=1))
    inner = pts @ np.conj(c)
    if rc < ORIGIN_EPS:
        return rc + rp
    out = np.abs(rc - rp) + np.abs(1.0 - inner / np.maximum(rc * rp, 1e-300))
    small = rp < ORIGIN_EPS
    if np.any(small):
        out = np.where(small, rc + rp, out)
    return out


@dataclass(frozen=True)
class PseudoBall:
    """Pseudo-ball B(center, radius); the region is B intersected with the
    open unit ball."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        c = np.asarray(self.center, dtype=complex).reshape(-1)
        object.__setattr__(self, "center", tuple(c.tolist()))

    @property
    def n(self):
        return len(self.center)

    @property
    def center_array(self):
        return np.asarray(self.center, dtype=complex)

    @property
    def center_modulus(self):
        return float(np.sqrt(np.sum(np.abs(self.center_array) ** 2)))

    def touches_boundary(self):
        return self.radius > 1.0 - self.center_modulus

    def contains(self, points):
        """Boolean mask for points of shape (N, n) (or a single point)."""
        pts = as_points(points)
        return distance_to(self.center_array, pts) < self.radius

    def contains_point(self, z):
        return pseudo_distance(self.center_array, z) < self.radius

    def describe(self):
        return {
            "center": [[zc.real, zc.imag] for zc in self.center],
            "radius": self.radius,
            "touches_boundary": bool(self.touches_boundary()),
        }


def regularization_ball(z, k):
    """B^k(z) = B(z, k*(1-|z|)) for 0 < k < 1; never touches the boundary."""
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie in (0, 1)")
    z = np.asarray(z, dtype=complex).reshape(-1)
    r = float(np.sqrt(np.sum(np.abs(z) ** 2)))
    if r >= 1.0:
        raise ValueError("center must lie in the open unit ball")
    return PseudoBall(tuple(z.tolist()), k * (1.0 - r))


def widened_k(k):
    """k' = k/(1-k): if z' is in B^k(z) then z is in B^{k'}(z'), k < 1/2."""
    if not 0.0 < k < 0.5:
        raise ValueError("k must lie in (0, 1/2)")
    return k / (1.0 - k)


@dataclass(frozen=True)
class FamilyDescriptor:
    """Deterministic ball-family layout: centers on dyadic radial shells
    1 - 2^{-j} (j = 0 .. radial_levels-1, so the origin is included), an
    equispaced angular set per shell, and the radius ladder 3 * 2^{-j}
    (j = 0 .. radii_count-1)."""

    radial_levels: int = 6
    angular_count: int = 12
    radii_count: int = 8
    class_b_only: bool = True

    def refined(self):
        """One refinement step: a deeper center shell, twice the angular
        resolution, and two more rungs on the radius ladder."""
        return replace(self, radial_levels=self.radial_levels + 1,
                       angular_count=self.angular_count * 2,
                       radii_count=self.radii_count + 2)

    def radii(self):
        return [3.0 * 2.0 ** (-j) for j in range(self.radii_count)]

    def centers(self):
        out = [np.array([0.0 + 0.0j])]
        for j in range(1, self.radial_levels):
            r = 1.0 - 2.0 ** (-j)
            for m in range(self.angular_count):
                th = 2.0 * np.pi * m / self.angular_count
                out.append(np.array([r * np.exp(1j * th)]))
        return out


@dataclass
class BallFamily:
    descriptor: FamilyDescriptor
    balls: list = field(default_factory=list)

    def __len__(self):
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)


def enumerate_ball_family(descriptor):
    """All descriptor balls, filtered to the boundary-touching class when
    ``class_b_only`` is set.  Ordering is deterministic."""
    balls = []
    for c in descriptor.centers():
        for r in descriptor.radii():
            b = PseudoBall(tuple(c.tolist()), r)
            if descriptor.class_b_only and not b.touches_boundary():
                continue
            balls.append(b)
    return BallFamily(descriptor=descriptor, balls=balls)


def pairwise_distance(z, zeta):
    """Elementwise d(z_i, zeta_i) for two point arrays of shape (N, n)."""
    a = as_points(z)
    b = as_points(zeta)
    ra = np.sqrt(np.sum(np.abs(a) ** 2, axis=1))
    rb = np.sqrt(np.sum(np.abs(b) ** 2, axis=1))
    inner = np.sum(a * np.conj(b), axis=1)
    out = np.abs(ra - rb) + np.abs(
        1.0 - inner / np.maximum(ra * rb, 1e-300))
    small = (ra < ORIGIN_EPS) | (rb < ORIGIN_EPS)
    if np.any(small):
        out = np.where(small, ra + rb, out)
    return out


def sample_points(count, rng, n=1, min_modulus=1e-9, max_modulus=None):
    """Seeded uniform sample from the unit ball of C^n, keeping moduli in
    [min_modulus, max_modulus).  Returns shape (count, n)."""
    if max_modulus is None:
        max_modulus = 1.0 - 1e-12
    dim = 2 * n
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.uniform(min_modulus ** dim, max_modulus ** dim, size=count)
    r = u ** (1.0 / dim)
    pts = g * r[:, None]
    return pts[:, 0::2] + 1j * pts[:, 1::2]


def boundary_curve_points(ball, count=64):
    """Sample points on the sphere {d(center, .) = radius} inside the unit
    ball (n = 1 only): for each admissible angular offset the two radial
    extremes, clipped to [0, 1)."""
    if ball.n != 1:
        raise ValueError("boundary sampling implemented for n = 1 only")
    c = ball.center_array[0]
    rc = abs(c)
    R = ball.radius
    if rc < ORIGIN_EPS:
        # Euclidean circle of radius min(R, 1)
        rr = min(R, 1.0 - 1e-12)
        th = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return (rr * np.exp(1j * th)).reshape(-1, 1)
    theta_c = np.angle(c)
    amax = min(2.0, R)
    psi_max = 2.0 * np.arcsin(amax / 2.0) if R < 2.0 else np.pi
    psis = np.linspace(-psi_max, psi_max, count)
    pts = []
    for psi in psis:
        t = R - 2.0 * abs(np.sin(psi / 2.0))
        if t < 0:
            continue
        for rho in (rc - t, rc + t):
            if 0.0 <= rho < 1.0:
                pts.append(rho * np.exp(1j * (theta_c + psi)))
    if not pts:
        return np.zeros((0, 1), dtype=complex)
    return np.asarray(pts, dtype=complex).reshape(-1, 1)
