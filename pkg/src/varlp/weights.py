"""Weights on the unit ball and their class constants.

A weight is a strictly positive function with a family tag.  Supplied
families: constants, radial powers (1-|z|^2)^gamma, an angular factor
1 + a*cos(arg z_1), products, and "log-power" weights
exp(c * ln^2(1-|z|^2)) which grow faster than every power toward the
boundary (useful as unambiguous out-of-class probes).

Class constants are suprema over a finite ball family of per-ball
quantities; every per-ball integral and Luxemburg norm is evaluated on
a conforming single-ball patch so that small boundary-touching balls
are resolved.  Estimates are therefore lower bounds of the true
suprema; "membership" is operationalized downstream as stability of
the estimate under family/patch refinement.

Constants implemented (per-ball quantity, sup over the family):

* boundary-ball product constant:
    (1/mu_a(B)) ||w^{1/p} chi_B||_{p(.)} ||w^{-1/p} chi_B||_{p'(.)}
* all-ball variant of the same product (unfiltered family);
* mixed-mean constant:
    (1/mu_a(B)^{p_B}) ||w chi_B||_1 ||w^{-1} chi_B||_{p'(.)/p(.)}
* double-average constant:
    (w(B)/mu_a(B)) * (w'(B)/mu_a(B))^{p_B - 1}
* pointwise-maximal constant: sup over nodes of (max over family balls
  containing the node of avg_B w) / w;
* power-law absolute-continuity fit (C, delta) for
  mu_a(E)/mu_a(B) <= C (w(E)/w(B))^delta.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .exponents import conjugate_value
from .norms import luxemburg_norm
from .quadrature import GridField, field_values, integrate

OVERFLOW_CAP = 1e280


@dataclass(frozen=True)
class Weight:
    name: str
    fn: object
    family: str = "user"
    params: dict = field(default_factory=dict)

    def __call__(self, points):
        pts = np.asarray(points)
        vals = np.asarray(self.fn(pts), dtype=float)
        if np.any(vals < 0.0) or np.any(np.isnan(vals)):
            raise ValueError(f"weight {self.name} not non-negative/finite")
        return vals

    def describe(self):
        return {"name": self.name, "family": self.family,
                "params": dict(self.params)}


def _moduli_sq(pts):
    return np.sum(np.abs(pts) ** 2, axis=1)


def constant_weight(c=1.0):
    c = float(c)
    return Weight(name=f"const{c:g}", fn=lambda pts: np.full(pts.shape[0], c),
                  family="constant", params={"c": c})


def power_weight(gamma):
    gamma = float(gamma)

    def fn(pts):
        u = 1.0 - _moduli_sq(pts)
        with np.errstate(over="ignore", divide="ignore"):
            return np.minimum(u**gamma, OVERFLOW_CAP)

    return Weight(name=f"power{gamma:+g}", fn=fn, family="power",
                  params={"gamma": gamma})


def angular_weight(amp=0.5):
    amp = float(amp)
    if not 0.0 <= amp < 1.0:
        raise ValueError("amplitude must keep the weight positive")
    return Weight(name=f"angular{amp:g}",
                  fn=lambda pts: 1.0 + amp * np.cos(np.angle(pts[:, 0])),
                  family="angular", params={"amp": amp})


def product_weight(w1, w2):
    return Weight(name=f"{w1.name}*{w2.name}",
                  fn=lambda pts: w1(pts) * w2(pts),
                  family="product", params={"factors": (w1.name, w2.name)})


def log_power_weight(c):
    """exp(c * ln^2(1-|z|^2)); for c > 0 grows faster than any power of
    1/(1-|z|^2) toward the boundary."""
    c = float(c)

    def fn(pts):
        u = np.maximum(1.0 - _moduli_sq(pts), 1e-300)
        with np.errstate(over="ignore"):
            return np.minimum(np.exp(c * np.log(u) ** 2), OVERFLOW_CAP)

    return Weight(name=f"logpow{c:g}", fn=fn, family="log-power",
                  params={"c": c})


def grid_weight(field_, name, family="sampled"):
    """Weight backed by per-node values of a GridField (usable only on
    its own grid)."""
    return Weight(name=name, fn=lambda pts: _grid_eval(field_, pts),
                  family=family, params={"grid_nodes": field_.grid.size})


def _grid_eval(field_, pts):
    if pts.shape[0] == field_.grid.size and np.array_equal(pts, field_.grid.points):
        return np.asarray(field_.values, dtype=float)
    raise ValueError("sampled weight evaluated off its grid")


def weight_corpus():
    """Default weight corpus; the good/bad split per (p, alpha) is located
    numerically, never assumed."""
    corpus = [constant_weight(1.0)]
    for g in (-0.5, 0.5, 1.0, 2.0, 4.0):
        corpus.append(power_weight(g))
    corpus.append(angular_weight(0.5))
    corpus.append(product_weight(power_weight(0.5), angular_weight(0.5)))
    corpus.append(log_power_weight(0.025))
    corpus.append(log_power_weight(0.05))
    return corpus


def dual_weight(w, p):
    """w' = w^{1 - p'(z)}; the involution (w')' under p' recovers w."""

    def fn(pts):
        pv = np.asarray(p(pts), dtype=float)
        wv = w(pts)
        with np.errstate(over="ignore", divide="ignore"):
            out = wv ** (1.0 - conjugate_value(pv))
        return np.minimum(out, OVERFLOW_CAP)

    return Weight(name=f"dual({w.name})", fn=fn, family="dual",
                  params={"base": w.name})


def weight_power_fraction(w, p, sign):
    """The function w^{sign/p(z)} as a plain callable."""

    def fn(pts):
        with np.errstate(over="ignore", divide="ignore"):
            return w(pts) ** (sign / np.asarray(p(pts), dtype=float))

    return fn


# ---------------------------------------------------------------------------
# class-constant reports


@dataclass
class ClassConstantReport:
    class_tag: str
    weight: str
    estimate: float
    argmax_ball: object
    per_ball: list                 # [(PseudoBall, value)]
    family_descriptor: object
    notes: dict = field(default_factory=dict)
    grid_descriptor: dict = None   # quadrature route used per ball
    per_ball_csv_path: str = None

    def to_dict(self):
        ball = self.argmax_ball.describe() if self.argmax_ball else None
        return {
            "class": self.class_tag,
            "weight": self.weight,
            "estimate": self.estimate,
            "argmax_ball": ball,
            "family": vars(self.family_descriptor) if self.family_descriptor else None,
            "grid": self.grid_descriptor,
            "n_balls": len(self.per_ball),
            "notes": dict(self.notes),
            "per_ball_csv_path": self.per_ball_csv_path,
        }

    def write_per_ball_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["center_re", "center_im", "radius", "value"])
            for ball, value in self.per_ball:
                c = ball.center_array[0]
                wr.writerow([f"{c.real:.17g}", f"{c.imag:.17g}",
                             f"{ball.radius:.17g}", f"{value:.17g}"])
        self.per_ball_csv_path = path
        return path


def _report(tag, w, family, values, notes=None, grid_descriptor=None):
    per_ball = list(zip(list(family), values))
    vals = np.asarray(values, dtype=float)
    live = ~np.isnan(vals)  # nan marks balls the quadrature cannot resolve
    notes = dict(notes or {})
    notes["skipped_balls"] = int(np.sum(~live))
    if not np.any(live):
        est, arg = 0.0, None
    elif np.any(np.isinf(vals[live])):
        est = np.inf
        arg = family.balls[int(np.flatnonzero(np.isinf(vals))[0])]
    else:
        masked = np.where(live, vals, -np.inf)
        i = int(np.argmax(masked))
        est, arg = float(vals[i]), family.balls[i]
    name = w.name if hasattr(w, "name") else "sampled"
    return ClassConstantReport(class_tag=tag, weight=name, estimate=est,
                               argmax_ball=arg, per_ball=per_ball,
                               family_descriptor=family.descriptor,
                               notes=notes, grid_descriptor=grid_descriptor)


# ---------------------------------------------------------------------------
# per-ball quantities (conforming-patch evaluation)


def per_ball_product(w, p, ball, cache):
    """(1/mu_a(B)) ||w^{1/p} chi_B||_{p(.)} ||w^{-1/p} chi_B||_{p'(.)}."""
    patch = cache.get(ball)
    mu = patch.total_mass()
    n1 = luxemburg_norm(weight_power_fraction(w, p, +1.0), p, patch)
    n2 = luxemburg_norm(weight_power_fraction(w, p, -1.0), p.conjugate(), patch)
    return n1.value * n2.value / mu


def per_ball_mixed(w, p, ball, cache):
    """(1/mu_a(B)^{p_B}) ||w chi_B||_1 ||w^{-1} chi_B||_{p'(.)/p(.)}."""
    patch = cache.get(ball)
    mu = patch.total_mass()
    pb = _patch_harmonic_mean(p, patch, mu)
    w_mass = integrate(w, patch)
    ratio = p.dual_ratio()
    ninv = luxemburg_norm(lambda pts: 1.0 / w(pts), ratio, patch)
    with np.errstate(over="ignore"):
        return w_mass * ninv.value / mu**pb


def per_ball_double_average(w, p, ball, cache):
    """(w(B)/mu_a(B)) * (w'(B)/mu_a(B))^{p_B-1}."""
    patch = cache.get(ball)
    mu = patch.total_mass()
    pb = _patch_harmonic_mean(p, patch, mu)
    w_mass = integrate(w, patch)
    wd_mass = integrate(dual_weight(w, p), patch)
    with np.errstate(over="ignore"):
        return (w_mass / mu) * (wd_mass / mu) ** (pb - 1.0)


def _patch_harmonic_mean(p, patch, mu):
    return mu / integrate(1.0 / p(patch.points), patch)


# ---------------------------------------------------------------------------
# per-ball quantities (node-mask evaluation on a shared global grid)
#
# The patch route needs the weight as a callable; for weights that only
# exist as node samples (e.g. after ball regularization) the same products
# are formed from region-masked norms on the global grid.  Balls holding no
# grid node return nan and are skipped (counted in report notes), so
# comparisons between two grid-route constants always range over the same
# resolvable balls.


def _grid_node_data(w, p, grid):
    wv = np.asarray(field_values(w, grid), dtype=float)
    pv = np.asarray(p(grid.points), dtype=float)
    return wv, pv


def per_ball_product_grid(w, p, ball, grid):
    idx = grid.mask(ball)
    if not np.any(idx):
        return np.nan
    mu = float(np.sum(grid.measure_weights[idx]))
    wv, pv = _grid_node_data(w, p, grid)
    with np.errstate(over="ignore", divide="ignore"):
        f1 = np.minimum(wv ** (1.0 / pv), OVERFLOW_CAP)
        f2 = np.minimum(wv ** (-1.0 / pv), OVERFLOW_CAP)
    n1 = luxemburg_norm(f1, p, grid, region=ball)
    n2 = luxemburg_norm(f2, p.conjugate(), grid, region=ball)
    return n1.value * n2.value / mu


def per_ball_mixed_grid(w, p, ball, grid):
    idx = grid.mask(ball)
    if not np.any(idx):
        return np.nan
    mw = grid.measure_weights
    mu = float(np.sum(mw[idx]))
    wv, pv = _grid_node_data(w, p, grid)
    pb = mu / float(np.sum(mw[idx] / pv[idx]))
    w_mass = float(np.sum(mw[idx] * wv[idx]))
    with np.errstate(over="ignore", divide="ignore"):
        ninv = luxemburg_norm(np.minimum(1.0 / wv, OVERFLOW_CAP),
                              p.dual_ratio(), grid, region=ball)
        return w_mass * ninv.value / mu**pb


def per_ball_double_average_grid(w, p, ball, grid):
    idx = grid.mask(ball)
    if not np.any(idx):
        return np.nan
    mw = grid.measure_weights
    mu = float(np.sum(mw[idx]))
    wv, pv = _grid_node_data(w, p, grid)
    pb = mu / float(np.sum(mw[idx] / pv[idx]))
    pcv = pv / (pv - 1.0)
    with np.errstate(over="ignore", divide="ignore"):
        wdv = np.minimum(wv ** (1.0 - pcv), OVERFLOW_CAP)
        w_mass = float(np.sum(mw[idx] * wv[idx]))
        wd_mass = float(np.sum(mw[idx] * wdv[idx]))
        return (w_mass / mu) * (wd_mass / mu) ** (pb - 1.0)


_GRID_VARIANTS = {
    per_ball_product: per_ball_product_grid,
    per_ball_mixed: per_ball_mixed_grid,
    per_ball_double_average: per_ball_double_average_grid,
}


def _sup_over_family(tag, w, p, family, cache, per_ball_fn):
    from .quadrature import QuadratureGrid

    if isinstance(cache, QuadratureGrid):
        per_ball_fn = _GRID_VARIANTS[per_ball_fn]
        gdesc = {"route": "grid", "scheme": cache.spec.scheme,
                 "radial": cache.spec.radial, "angular": cache.spec.angular,
                 "order": cache.spec.order, "grading": cache.spec.grading}
    else:
        gdesc = {"route": "patch"}
    vals = []
    for ball in family:
        try:
            v = per_ball_fn(w, p, ball, cache)
        except (OverflowError, FloatingPointError):
            v = np.inf
        vals.append(v if (np.isfinite(v) or np.isnan(v)) else np.inf)
    return _report(tag, w, family, vals,
                   notes={"exponent": p.name, "alpha": cache.params.alpha},
                   grid_descriptor=gdesc)


def bekolle_constant(w, p, family, cache):
    """Norm-product constant over a boundary-touching family."""
    if family.descriptor.class_b_only is False:
        raise ValueError("expected a boundary-touching ball family")
    return _sup_over_family("boundary-product", w, p, family, cache,
                            per_ball_product)


def muckenhoupt_constant(w, p, family, cache):
    """Norm-product constant over an unfiltered (all-balls) family."""
    if family.descriptor.class_b_only:
        raise ValueError("all-ball constant needs an unfiltered family")
    return _sup_over_family("all-ball-product", w, p, family, cache,
                            per_ball_product)


def bplus_constant(w, p, family, cache):
    return _sup_over_family("mixed-mean", w, p, family, cache, per_ball_mixed)


def bplusplus_constant(w, p, family, cache):
    return _sup_over_family("double-average", w, p, family, cache,
                            per_ball_double_average)


def b1_constant(w, family, grid):
    """sup over nodes of (maximal family-ball average of w) / w.

    Mask-based node averages on the supplied global grid, so sampled
    (grid-field) weights are admissible."""
    from .operators import maximal_boundary

    wv = field_values(w, grid)
    if np.any(wv <= 0.0):
        raise ValueError("weight must be strictly positive for the "
                         "pointwise-maximal constant")
    mx = maximal_boundary(GridField(grid=grid, values=wv), family, grid)
    covered = mx.values > 0.0
    ratios = mx.values[covered] / wv[covered]
    i = int(np.argmax(ratios))
    est = float(ratios[i])
    report = ClassConstantReport(
        class_tag="pointwise-maximal", weight=getattr(w, "name", "field"),
        estimate=est, argmax_ball=None, per_ball=[],
        family_descriptor=family.descriptor,
        notes={"covered_nodes": int(np.sum(covered)), "grid_nodes": grid.size},
        grid_descriptor={"route": "grid", "scheme": grid.spec.scheme,
                         "radial": grid.spec.radial,
                         "angular": grid.spec.angular,
                         "order": grid.spec.order,
                         "grading": grid.spec.grading})
    return report


# ---------------------------------------------------------------------------
# power-law absolute-continuity fit


@dataclass(frozen=True)
class LambdaFit:
    C: float
    delta: float
    violations: int
    samples: int


def _grid_cells(grid):
    """Node indices grouped by quadrature cell (radial panel x angular
    sector); cached on the grid."""
    cached = getattr(grid, "_weight_cells", None)
    if cached is not None:
        return cached
    if grid.panel_lo is None:
        groups = [np.array([i]) for i in range(grid.size)]
    else:
        keys = np.stack([grid.panel_lo, grid.sector_lo], axis=1)
        _, inv = np.unique(keys, axis=0, return_inverse=True)
        order = np.argsort(inv, kind="stable")
        counts = np.bincount(inv)
        groups = np.split(order, np.cumsum(counts)[:-1])
    grid._weight_cells = groups
    return groups


def lambda_samples(w, family, grid, seed=0, subsets_per_ball=64,
                   max_cells=8):
    """(mu_a(E)/mu_a(B), w(E)/w(B)) over sampled subsets E of family
    balls; E ranges over B itself and random unions of 1..max_cells grid
    cells inside B."""
    rng = np.random.default_rng(seed)
    wv = field_values(w, grid)
    mw = grid.measure_weights
    wmass = wv * mw
    total_w = float(np.sum(wmass))
    if not np.isfinite(total_w) or total_w <= 0.0:
        raise ValueError("weight is not integrable on this grid")

    cells = _grid_cells(grid)
    cell_of = np.empty(grid.size, dtype=int)
    for ci, members in enumerate(cells):
        cell_of[members] = ci

    mu_ratios, w_ratios = [], []
    for ball in family:
        m = grid.mask(ball)
        idx = np.flatnonzero(m)
        if idx.size == 0:
            continue
        mu_b = float(np.sum(mw[idx]))
        w_b = float(np.sum(wmass[idx]))
        if mu_b <= 0.0 or w_b <= 0.0:
            continue
        ball_cells = np.unique(cell_of[idx])
        subsets = [idx]  # E = B itself
        for _ in range(subsets_per_ball):
            k = int(rng.integers(1, max_cells + 1))
            chosen = rng.choice(ball_cells, size=min(k, ball_cells.size),
                                replace=False)
            # clip each cell to the ball so E stays inside B
            sub = np.concatenate([np.intersect1d(cells[c], idx)
                                  for c in chosen])
            subsets.append(sub)
        for sub in subsets:
            mu_e = float(np.sum(mw[sub]))
            w_e = float(np.sum(wmass[sub]))
            if mu_e <= 0.0 or w_e <= 0.0:
                continue
            mu_ratios.append(mu_e / mu_b)
            w_ratios.append(w_e / w_b)
    return np.asarray(mu_ratios), np.asarray(w_ratios)


def lambda_class_fit(w, family, grid, seed=0, subsets_per_ball=64,
                     max_cells=8, deltas=None):
    """Fit (C, delta) with zero violations of
    mu_a(E)/mu_a(B) <= C (w(E)/w(B))^delta over sampled cell-union
    subsets E of family balls (E = B included).  delta is scanned on a
    log grid; C(delta) is the max observed ratio; the fit minimizes C,
    ties resolved toward the largest delta."""
    if deltas is None:
        deltas = np.logspace(-2, 0, 25)
    mu_ratios, w_ratios = lambda_samples(w, family, grid, seed=seed,
                                         subsets_per_ball=subsets_per_ball,
                                         max_cells=max_cells)
    best = None
    for d in deltas:
        c = float(np.max(mu_ratios / w_ratios**d))
        if best is None or c < best[0] - 1e-15 or (
                abs(c - best[0]) <= 1e-15 and d > best[1]):
            best = (c, float(d))
    c_fit, d_fit = best
    viol = int(np.sum(mu_ratios > c_fit * w_ratios**d_fit * (1.0 + 1e-12)))
    return LambdaFit(C=c_fit, delta=d_fit, violations=viol,
                     samples=int(mu_ratios.size))


def lambda_violations(w, family, grid, C, delta, seed=0,
                      subsets_per_ball=64, max_cells=8, margin=1e-12):
    """Count violations of the frozen (C, delta) power-law bound on a
    fresh subset sample."""
    mu_ratios, w_ratios = lambda_samples(w, family, grid, seed=seed,
                                         subsets_per_ball=subsets_per_ball,
                                         max_cells=max_cells)
    viol = int(np.sum(mu_ratios > C * w_ratios**delta * (1.0 + margin)))
    return viol, int(mu_ratios.size)


def doubling_ratio(w, family, cache):
    """max of w(B~)/w(B) over family balls whose double-radius companion
    stays admissible (radius <= 1.5 keeps the double below the clamp)."""
    from .geometry import PseudoBall

    worst = 0.0
    for ball in family:
        if ball.radius > 1.5:
            continue
        big = PseudoBall(ball.center, 2.0 * ball.radius)
        if not big.touches_boundary():
            continue
        w_small = integrate(w, cache.get(ball))
        w_big = integrate(w, cache.get(big))
        if w_small > 0.0:
            worst = max(worst, w_big / w_small)
    return worst
