"""Variable exponent fields p(.) on the unit ball.

An exponent field carries its evaluator together with declared global
bounds 1 <= p_minus <= p(z) <= p_plus < infinity (auxiliary fields used
as Luxemburg exponents of quotient type may have any positive lower
bound).  Supplied families:

* ``constant(p0)``
* ``radial_sin``      p(z) = 2 + sin|z|            (log-regular)
* ``angular_cos``     p(z) = 2 + 0.5*cos(arg z_1)  (log-regular)

Regional quantities: p_-(B), p_+(B) over quadrature nodes plus boundary
samples, the harmonic mean exponent p_B = (average of 1/p)^{-1}, the
arithmetic mean <p>_B, and the sampled regularity functional
sup |p(z)-p(zeta)| * ln(e + 1/d(z, zeta)).
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import PseudoBall, boundary_curve_points, sample_points
from .quadrature import integrate


@dataclass(frozen=True)
class ExponentField:
    name: str
    fn: object
    p_minus: float
    p_plus: float
    auxiliary: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.p_minus <= 0 or self.p_plus < self.p_minus:
            raise ValueError("need 0 < p_minus <= p_plus")
        if not self.auxiliary and self.p_minus < 1.0:
            raise ValueError("non-auxiliary exponents need p_minus >= 1")

    def __call__(self, points):
        pts = np.asarray(points)
        return np.asarray(self.fn(pts), dtype=float)

    @property
    def is_constant(self):
        return self.p_minus == self.p_plus

    def conjugate(self):
        """Pointwise 1/p + 1/p' = 1.  Requires p_minus > 1."""
        if self.p_minus <= 1.0:
            raise ValueError("conjugate needs p_minus > 1")
        fn = self.fn
        return ExponentField(
            name=f"conj({self.name})",
            fn=lambda pts: _conj(np.asarray(fn(pts), dtype=float)),
            p_minus=_conj(self.p_plus),
            p_plus=_conj(self.p_minus),
            params=dict(self.params, base=self.name),
        )

    def dual_ratio(self):
        """The auxiliary exponent p'(.)/p(.) = 1/(p-1)."""
        if self.p_minus <= 1.0:
            raise ValueError("dual ratio needs p_minus > 1")
        fn = self.fn
        return ExponentField(
            name=f"ratio({self.name})",
            fn=lambda pts: 1.0 / (np.asarray(fn(pts), dtype=float) - 1.0),
            p_minus=1.0 / (self.p_plus - 1.0),
            p_plus=1.0 / (self.p_minus - 1.0),
            auxiliary=True,
            params=dict(self.params, base=self.name),
        )

    def describe(self):
        return {"name": self.name, "p_minus": self.p_minus,
                "p_plus": self.p_plus, "auxiliary": self.auxiliary}


def _conj(p):
    return p / (p - 1.0)


def conjugate_value(p):
    """Scalar/array conjugate exponent."""
    return _conj(np.asarray(p, dtype=float))


def constant(p0):
    p0 = float(p0)
    return ExponentField(name=f"const{p0:g}", fn=lambda pts: np.full(pts.shape[0], p0),
                         p_minus=p0, p_plus=p0, params={"p0": p0})


def radial_sin():
    return ExponentField(
        name="2+sin|z|",
        fn=lambda pts: 2.0 + np.sin(np.sqrt(np.sum(np.abs(pts) ** 2, axis=1))),
        p_minus=2.0, p_plus=2.0 + np.sin(1.0),
    )


def angular_cos():
    return ExponentField(
        name="2+0.5cos(arg)",
        fn=lambda pts: 2.0 + 0.5 * np.cos(np.angle(pts[:, 0])),
        p_minus=1.5, p_plus=2.5,
    )


def exponent_corpus():
    """Default exponent corpus: constants and the two variable families."""
    return [constant(1.5), constant(2.0), constant(3.0), radial_sin(), angular_cos()]


def bounds_on(p, region, grid, boundary_count=64):
    """(p_-(B), p_+(B)) over the region's nodes plus, for n = 1
    pseudo-balls, samples of the region boundary curve."""
    mask = grid.mask(region)
    if mask is None:
        vals = p(grid.points)
    else:
        if not np.any(mask):
            raise ValueError("region contains no quadrature nodes")
        vals = p(grid.points[mask])
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if isinstance(region, PseudoBall) and region.n == 1 and boundary_count:
        bpts = boundary_curve_points(region, boundary_count)
        if bpts.size:
            bvals = p(bpts)
            lo = min(lo, float(np.min(bvals)))
            hi = max(hi, float(np.max(bvals)))
    return lo, hi


def harmonic_mean_exponent(p, region, grid):
    """p_B: reciprocal of the mu_alpha-average of 1/p over the region."""
    total = integrate(np.ones(grid.size), grid, region=region)
    if total <= 0:
        raise ValueError("region has zero measure on this grid")
    avg_inv = integrate(1.0 / p(grid.points), grid, region=region) / total
    return 1.0 / avg_inv


def mean_exponent(p, region, grid):
    """<p>_B: the mu_alpha-average of p over the region."""
    total = integrate(np.ones(grid.size), grid, region=region)
    if total <= 0:
        raise ValueError("region has zero measure on this grid")
    return integrate(p(grid.points), grid, region=region) / total


def log_holder_estimate(p, count=4000, seed=0, n=1):
    """sup over seeded pairs of |p(z)-p(zeta)| * ln(e + 1/d(z, zeta)).

    A finite stand-in for the log-regularity constant; stability under
    sample doubling is the caller's check."""
    rng = np.random.default_rng(seed)
    z = sample_points(count, rng, n=n)
    w = sample_points(count, rng, n=n)
    pz = p(z)
    pw = p(w)
    rz = np.sqrt(np.sum(np.abs(z) ** 2, axis=1))
    rw = np.sqrt(np.sum(np.abs(w) ** 2, axis=1))
    inner = np.sum(z * np.conj(w), axis=1)
    d = np.abs(rz - rw) + np.abs(1.0 - inner / (rz * rw))
    d = np.maximum(d, 1e-300)
    return float(np.max(np.abs(pz - pw) * np.log(np.e + 1.0 / d)))
