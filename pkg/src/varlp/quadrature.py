"""Quadrature over the unit ball against the graded measure
dmu_alpha = (1-|z|^2)^{alpha-1} dmu (dmu = Lebesgue, unnormalized:
mu(ball) = pi^n/n!).

Three node layouts:

* ``polar-tensor`` (n = 1, deterministic): radial panels accumulating
  geometrically toward the boundary (ratio 2^{-grading}), Gauss-Legendre
  nodes per panel, uniform angular midpoints.  Optional ``breakpoints``
  force panel edges at given radii so that indicator integrands aligned
  with origin-centered circles are resolved exactly by node membership.
* ``ball-patch`` (n = 1, deterministic): a conforming chart quadrature of
  a single pseudo-ball.  In polar coordinates relative to the center the
  ball is the graph domain  |rho - rho_c| < R - 2|sin(psi/2)|,  so the
  patch integrates exactly over the ball (no boundary-straddling cells),
  with geometric radial sub-panels toward rho = 1 where the density or a
  weight can be singular.
* ``monte-carlo`` (n >= 1, seeded): importance sampling with the radial
  Beta(n, alpha) law so that the alpha-density has finite variance.

All region membership for the masked ``integrate`` is decided per node
by the pseudo-ball predicate; there is no cut-cell correction.  Sums use
numpy pairwise reduction and are bit-stable for a fixed grid.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from .geometry import ORIGIN_EPS, PseudoBall


@dataclass(frozen=True)
class MeasureParams:
    n: int = 1
    alpha: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


def mu_alpha_total(params):
    """Closed form of mu_alpha(unit ball): n=1 -> pi/alpha,
    n=2 -> pi^2/(alpha*(alpha+1)); general via the Beta integral."""
    n, a = params.n, params.alpha
    # vol(S^{2n-1}) = 2 pi^n / (n-1)!;  radial: (1/2) B(n, alpha)
    surf = 2.0 * math.pi ** n / math.factorial(n - 1)
    radial = 0.5 * math.gamma(n) * math.gamma(a) / math.gamma(n + a)
    return surf * radial


def mu_alpha_origin_disk(r, params):
    """Closed form of mu_alpha(B(0, r)) for n = 1: pi*(1-(1-r^2)^alpha)/alpha."""
    if params.n != 1:
        raise ValueError("closed form implemented for n = 1")
    a = params.alpha
    r = min(r, 1.0)
    return math.pi * (1.0 - (1.0 - r * r) ** a) / a


@dataclass(frozen=True)
class GridSpec:
    """Resolution knobs for ``build_grid``.

    radial   — number of geometric depth levels toward the boundary
    subdiv   — equal subdivisions of each radial panel (bulk resolution)
    angular  — number of uniform angular nodes
    grading  — geometric ratio is 2^{-grading}
    order    — Gauss-Legendre order per radial panel
    """

    scheme: str = "polar-tensor"
    radial: int = 28
    subdiv: int = 1
    angular: int = 48
    grading: float = 1.5
    order: int = 6
    seed: int = 0
    breakpoints: tuple = ()
    mc_nodes: int = 40000
    # Deepest admissible radial level: levels 1 - q^j stop once q^j drops
    # below this.  refined() lowers it so refinement also sharpens the
    # boundary tail; the clamp keeps 1 - |z|^2 representable in doubles.
    min_panel: float = 1e-13

    def refined(self, factor=2):
        return replace(
            self,
            radial=self.radial + 7 * factor,
            subdiv=self.subdiv * factor,
            angular=self.angular * factor,
            mc_nodes=self.mc_nodes * factor * factor,
            min_panel=max(self.min_panel / 16.0 ** factor, 5e-15),
        )


@dataclass
class QuadratureGrid:
    """Nodes, Lebesgue weights and the alpha-density evaluated at nodes.

    integrate(f) = sum weights * f * alpha_density  (optionally masked to
    a region).  For polar-tensor grids the cell bookkeeping (radial panel
    and angular sector per node) supports local kernel refinement."""

    params: MeasureParams
    spec: GridSpec
    points: np.ndarray        # (N, n) complex
    weights: np.ndarray       # (N,) Lebesgue weights
    alpha_density: np.ndarray  # (N,)
    radii: np.ndarray         # (N,) moduli
    panel_lo: np.ndarray = None
    panel_hi: np.ndarray = None
    sector_lo: np.ndarray = None
    sector_hi: np.ndarray = None
    ball: PseudoBall = None   # set for ball patches

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def measure_weights(self):
        return self.weights * self.alpha_density

    def total_mass(self):
        return float(np.sum(self.measure_weights))

    def mask(self, region):
        if region is None:
            return None
        return region.contains(self.points)


MIN_PANEL_WIDTH = 1e-13  # absolute floor; keeps nodes representably below 1


def _radial_panel_edges(lo, hi, ratio, max_levels, tail_rel):
    """Panel edges on [lo, hi] accumulating geometrically toward hi.

    Subdivision stops once the panel width reaches either half the gap
    between hi and the potential singularity at 1 (nothing singular is
    inside reach), or tail_rel * (hi - lo) (documented truncation scale
    for integrands singular at hi = 1), or an absolute floor protecting
    float representability near 1."""
    length = hi - lo
    if length <= 0:
        return None
    gap = max(0.0, 1.0 - hi)
    floor_w = max(0.5 * gap, length * tail_rel, MIN_PANEL_WIDTH)
    widths = []
    w = length * ratio
    while w > floor_w and len(widths) < max_levels:
        widths.append(w)
        w *= ratio
    edges = [lo] + [hi - ww for ww in widths] + [hi]
    arr = np.array(edges)
    keep = np.concatenate(([True], np.diff(arr) > 0))
    return arr[keep]


def _gl_on_panels(edges, order):
    """Gauss-Legendre nodes/weights on consecutive [edges] panels, plus the
    panel bounds each node belongs to."""
    x, w = leggauss(order)
    los = edges[:-1]
    his = edges[1:]
    half = 0.5 * (his - los)
    mid = 0.5 * (his + los)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    nlo = np.repeat(los, order)
    nhi = np.repeat(his, order)
    return nodes, wts, nlo, nhi


def build_grid(params, spec=None):
    """Build the global quadrature grid for ``params``."""
    spec = spec or GridSpec()
    if spec.scheme == "monte-carlo":
        return _build_mc_grid(params, spec)
    if spec.scheme != "polar-tensor":
        raise ValueError(f"unknown scheme {spec.scheme!r}")
    if params.n != 1:
        raise ValueError("polar-tensor grids are implemented for n = 1")

    q = 2.0 ** (-spec.grading)
    base = [0.0]
    for j in range(1, spec.radial + 1):
        if q ** j < spec.min_panel:
            break
        base.append(1.0 - q ** j)
    edges = set(base)
    for b in spec.breakpoints:
        if 0.0 < b < base[-1]:
            edges.add(float(b))
    edges = np.array(sorted(edges))
    if spec.subdiv > 1:
        fine = [edges[0]]
        for lo, hi in zip(edges[:-1], edges[1:]):
            fine.extend(np.linspace(lo, hi, spec.subdiv + 1)[1:])
        edges = np.array(fine)

    rnodes, rwts, rlo, rhi = _gl_on_panels(edges, spec.order)

    ntheta = spec.angular
    dtheta = 2.0 * np.pi / ntheta
    thetas = (np.arange(ntheta) + 0.5) * dtheta

    rr = np.repeat(rnodes, ntheta)
    ww = np.repeat(rwts, ntheta)
    th = np.tile(thetas, rnodes.size)
    pts = (rr * np.exp(1j * th)).reshape(-1, 1)
    weights = ww * rr * dtheta
    dens = ((1.0 - rr) * (1.0 + rr)) ** (params.alpha - 1.0)

    return QuadratureGrid(
        params=params,
        spec=spec,
        points=pts,
        weights=weights,
        alpha_density=dens,
        radii=rr,
        panel_lo=np.repeat(rlo, ntheta),
        panel_hi=np.repeat(rhi, ntheta),
        sector_lo=th - 0.5 * dtheta,
        sector_hi=th + 0.5 * dtheta,
    )


def _build_mc_grid(params, spec):
    rng = np.random.default_rng(spec.seed)
    n, a = params.n, params.alpha
    N = spec.mc_nodes
    t = rng.beta(n, a, size=N)
    r = np.sqrt(t)
    g = rng.standard_normal((N, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = (g[:, 0::2] + 1j * g[:, 1::2]) * r[:, None]
    r = np.clip(r, 0.0, 1.0 - 1e-15)
    dens = (1.0 - r * r) ** (a - 1.0)
    total = mu_alpha_total(params)
    weights = total / (N * dens)
    return QuadratureGrid(
        params=params,
        spec=spec,
        points=pts,
        weights=weights,
        alpha_density=dens,
        radii=r,
    )


@dataclass(frozen=True)
class PatchResolution:
    """Resolution of a conforming ball patch."""

    psi_panels: int = 4
    psi_order: int = 6
    rho_ratio: float = 0.25
    rho_levels: int = 40
    rho_order: int = 5
    tail_rel: float = 1e-10

    def refined(self):
        return replace(
            self,
            psi_panels=self.psi_panels * 2,
            psi_order=self.psi_order + 2,
            rho_levels=self.rho_levels + 20,
            rho_order=self.rho_order + 2,
            tail_rel=self.tail_rel * 1e-4,
        )

    def key(self):
        return (self.psi_panels, self.psi_order, self.rho_ratio,
                self.rho_levels, self.rho_order, self.tail_rel)


def _patch_origin(ball, params, res):
    rmax = min(ball.radius, 1.0)
    edges = _radial_panel_edges(0.0, rmax, res.rho_ratio, res.rho_levels,
                               res.tail_rel)
    rnodes, rwts, _, _ = _gl_on_panels(edges, res.rho_order)
    ntheta = max(8, 4 * res.psi_panels)
    dtheta = 2.0 * np.pi / ntheta
    thetas = (np.arange(ntheta) + 0.5) * dtheta
    rr = np.repeat(rnodes, ntheta)
    ww = np.repeat(rwts, ntheta) * rr * dtheta
    th = np.tile(thetas, rnodes.size)
    pts = (rr * np.exp(1j * th)).reshape(-1, 1)
    dens = ((1.0 - rr) * (1.0 + rr)) ** (params.alpha - 1.0)
    return QuadratureGrid(params=params, spec=GridSpec(scheme="ball-patch"),
                          points=pts, weights=ww, alpha_density=dens,
                          radii=rr, ball=ball)


def ball_patch(ball, params, res=None):
    """Conforming quadrature of a single pseudo-ball (n = 1).

    The chart splits the angular range at the geometric kinks (clipping
    at rho = 1 and rho = 0, and the |sin| kink at psi = 0) and carries a
    per-angle radial quadrature graded toward rho = 1."""
    res = res or PatchResolution()
    if ball.n != 1:
        raise ValueError("ball patches are implemented for n = 1")
    if params.n != 1:
        raise ValueError("params.n must be 1 for ball patches")
    c = ball.center_array[0]
    rho_c = abs(c)
    R = ball.radius
    if rho_c < 1e-12:
        return _patch_origin(ball, params, res)
    theta_c = np.angle(c)

    psi_max = np.pi if R >= 2.0 else 2.0 * np.arcsin(R / 2.0)
    kinks = {0.0, psi_max}
    for a in (R - (1.0 - rho_c), R - rho_c):
        if 0.0 < a < min(2.0, R):
            psi = 2.0 * np.arcsin(min(1.0, a / 2.0))
            if 0.0 < psi < psi_max:
                kinks.add(psi)
    cuts = sorted(kinks)
    psi_edges = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        width = hi - lo
        npan = max(1, int(np.ceil(res.psi_panels * width / psi_max)))
        psi_edges.append(np.linspace(lo, hi, npan + 1))
    # mirror to negative psi
    pan_edges = []
    for e in psi_edges:
        pan_edges.append(e)
        pan_edges.append(-e[::-1])

    gx, gw = leggauss(res.psi_order)
    pts_l, wts_l, dens_l, rad_l = [], [], [], []
    for e in pan_edges:
        for lo, hi in zip(e[:-1], e[1:]):
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            for xx, wpsi in zip(gx, gw):
                psi = mid + half * xx
                t = R - 2.0 * abs(np.sin(psi / 2.0))
                if t <= 0.0:
                    continue
                rlo = max(0.0, rho_c - t)
                rhi = min(1.0, rho_c + t)
                edges = _radial_panel_edges(rlo, rhi, res.rho_ratio,
                                            res.rho_levels, res.tail_rel)
                if edges is None:
                    continue
                rnodes, rwts, _, _ = _gl_on_panels(edges, res.rho_order)
                w_all = rwts * rnodes * (wpsi * half)
                pts_l.append(rnodes * np.exp(1j * (theta_c + psi)))
                wts_l.append(w_all)
                rad_l.append(rnodes)
    rr = np.concatenate(rad_l)
    pts = np.concatenate(pts_l).reshape(-1, 1)
    wts = np.concatenate(wts_l)
    dens = ((1.0 - rr) * (1.0 + rr)) ** (params.alpha - 1.0)
    return QuadratureGrid(params=params, spec=GridSpec(scheme="ball-patch"),
                          points=pts, weights=wts, alpha_density=dens,
                          radii=rr, ball=ball)


class PatchCache:
    """Memoized conforming patches keyed by (ball, alpha, resolution)."""

    def __init__(self, params, res=None):
        self.params = params
        self.res = res or PatchResolution()
        self._store = {}

    def get(self, ball):
        key = (ball.center, ball.radius, self.params.alpha, self.res.key())
        patch = self._store.get(key)
        if patch is None:
            patch = ball_patch(ball, self.params, self.res)
            self._store[key] = patch
        return patch

    def refined(self):
        return PatchCache(self.params, self.res.refined())


@dataclass
class GridField:
    """Values of a function at the nodes of a grid."""

    grid: QuadratureGrid
    values: np.ndarray
    label: str = ""

    @classmethod
    def from_callable(cls, grid, f, label=""):
        vals = np.asarray(f(grid.points))
        return cls(grid=grid, values=vals, label=label or getattr(f, "__name__", ""))


def field_values(f, grid):
    """Evaluate callable / GridField / array / scalar on a grid's nodes."""
    if isinstance(f, GridField):
        if f.grid is not grid:
            raise ValueError("field belongs to a different grid")
        return f.values
    if callable(f):
        return np.asarray(f(grid.points))
    if np.isscalar(f):
        return np.full(grid.size, f, dtype=float)
    arr = np.asarray(f)
    if arr.shape[0] != grid.size:
        raise ValueError("array length does not match grid size")
    return arr


def integrate(f, grid, region=None):
    """Integral of f against dmu_alpha over the whole ball or a masked
    pseudo-ball region.  Nodes outside the region contribute nothing; an
    empty intersection yields 0."""
    vals = field_values(f, grid)
    mw = grid.measure_weights
    if region is not None:
        m = grid.mask(region)
        vals = np.where(m, vals, 0.0)
    out = np.sum(mw * vals)
    if np.iscomplexobj(vals):
        return complex(out)
    return float(out)


def mu_alpha(region, grid):
    """Masked-node measure of a region on this grid."""
    return integrate(np.ones(grid.size), grid, region=region)


def mu_alpha_patch(ball, cache):
    """Measure of a ball from its conforming patch (accurate for small
    boundary balls where masked global nodes are too coarse)."""
    return cache.get(ball).total_mass()


def export_nodes_csv(grid, path):
    """Write nodes/weights as CSV (columns re, im, weight; one re/im pair
    per complex coordinate)."""
    import csv

    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        n = grid.params.n
        if n == 1:
            wr.writerow(["re", "im", "weight"])
            for z, w in zip(grid.points[:, 0], grid.weights):
                wr.writerow([repr(float(z.real)), repr(float(z.imag)),
                             repr(float(w))])
        else:
            cols = []
            for j in range(n):
                cols += [f"re{j}", f"im{j}"]
            wr.writerow(cols + ["weight"])
            for row, w in zip(grid.points, grid.weights):
                flat = []
                for z in row:
                    flat += [repr(float(z.real)), repr(float(z.imag))]
                wr.writerow(flat + [repr(float(w))])


def export_field_csv(field_, path):
    """Write a grid field as CSV (node coordinates plus value) for
    audit or hand-off."""
    import csv

    grid = field_.grid
    vals = np.asarray(field_.values, dtype=float)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        n = grid.params.n
        if n == 1:
            wr.writerow(["re", "im", "value"])
            for z, v in zip(grid.points[:, 0], vals):
                wr.writerow([repr(float(z.real)), repr(float(z.imag)),
                             repr(float(v))])
        else:
            cols = []
            for j in range(n):
                cols += [f"re{j}", f"im{j}"]
            wr.writerow(cols + ["value"])
            for row, v in zip(grid.points, vals):
                flat = []
                for z in row:
                    flat += [repr(float(z.real)), repr(float(z.imag))]
                wr.writerow(flat + [repr(float(v))])
