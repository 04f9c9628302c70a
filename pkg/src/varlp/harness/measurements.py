"""Statistic computations shared by calibration and the suites.

Each function returns plain numbers (or small tuples/dicts of them); the
suites wrap them into CheckResults, and the calibration run freezes
margins on top of them.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..geometry import PseudoBall
from ..quadrature import (GridField, build_grid, field_values,
                          mu_alpha_origin_disk, mu_alpha_total)
from ..norms import (constant_p_norm, luxemburg_norm, modular, pairing,
                     subordinate_norm_lb)
from ..weights import (bekolle_constant, bplus_constant, bplusplus_constant,
                       dual_weight, muckenhoupt_constant, per_ball_product)
from ..exponents import constant as constant_exponent
from ..exponents import harmonic_mean_exponent, mean_exponent, bounds_on
from .. import operators as ops
from .context import dyadic_boundary_balls, classify_slope

STABILITY_GROWTH = 1.10  # "stable" = at most 10% growth under refinement


# ---------------------------------------------------------------------------
# geometry / measure


def density_ratio_samples(ctx, n_balls=24, per_ball=8, seed=0,
                          u_lo=0.05):
    """Pairs (r/R, mu_a(B(zeta,r))/mu_a(B(z,R))) for zeta sampled inside
    boundary-touching balls B(z,R) and r = u R."""
    rng = np.random.default_rng(seed)
    cache = ctx.patch_cache
    balls = [b for b in ctx.family().balls if b.radius <= 1.0]
    idx = rng.choice(len(balls), size=min(n_balls, len(balls)), replace=False)
    us, ratios = [], []
    for i in idx:
        big = balls[i]
        patch = cache.get(big)
        mu_big = patch.total_mass()
        if mu_big <= 0.0:
            continue
        inside = patch.points[:, 0]
        for _ in range(per_ball):
            zeta = inside[int(rng.integers(0, inside.size))]
            u = float(rng.uniform(u_lo, 1.0))
            small = PseudoBall((zeta,), u * big.radius)
            mu_small = cache.get(small).total_mass()
            if mu_small <= 0.0:
                continue
            us.append(u)
            ratios.append(mu_small / mu_big)
    return np.asarray(us), np.asarray(ratios)


def density_fit(us, ratios, margin=0.8, gamma_pad=1.1):
    """(C_hat, gamma_hat) such that ratio >= C_hat u^{gamma_hat} holds on
    the calibration sample with margin to spare."""
    below = us < 0.999
    expo = np.log(ratios[below]) / np.log(us[below])
    gamma = float(gamma_pad * max(np.max(expo), 1.0))
    c = float(margin * np.min(ratios / us**gamma))
    return c, gamma


def density_violations(us, ratios, c, gamma):
    return int(np.sum(ratios < c * us**gamma))


def measure_growth_envelope(ctx, r_lo=2.0**-10, r_hi=3.0):
    """max/min over boundary-touching balls of mu_a(B)/R^{n+alpha} for
    radii in [r_lo, r_hi] (dyadic ladder balls fill in the small radii)."""
    cache = ctx.patch_cache
    npow = ctx.params.n + ctx.params.alpha
    vals = []
    balls = list(ctx.family().balls) + dyadic_boundary_balls(4, 10)
    for b in balls:
        if not (r_lo <= b.radius <= r_hi):
            continue
        mu = cache.get(b).total_mass()
        if mu > 0.0:
            vals.append(mu / b.radius**npow)
    vals = np.asarray(vals)
    return float(np.max(vals) / np.min(vals))


def patch_refinement_drift(ctx, n_balls=12, seed=0):
    """max relative change of mu_a(B) when the patch resolution is
    refined one step."""
    from ..quadrature import PatchCache, PatchResolution

    rng = np.random.default_rng(seed)
    balls = ctx.family().balls
    idx = rng.choice(len(balls), size=min(n_balls, len(balls)), replace=False)
    fine_cache = PatchCache(ctx.params, PatchResolution().refined())
    worst = 0.0
    for i in idx:
        b = balls[i]
        base = ctx.patch_cache.get(b).total_mass()
        fine = fine_cache.get(b).total_mass()
        if fine > 0.0:
            worst = max(worst, abs(base - fine) / fine)
    return worst


def origin_disk_error(ctx, r0):
    """Relative error of the centered-disk mass against the closed form,
    on a grid with a panel edge aligned at the disk radius."""
    spec = replace(ctx.grid_spec(), breakpoints=tuple(
        sorted(set(ctx.grid_spec().breakpoints) | {float(r0)})))
    grid = build_grid(ctx.params, spec)
    inside = grid.radii < r0
    got = float(np.sum(grid.measure_weights[inside]))
    exact = mu_alpha_origin_disk(r0, ctx.params)
    return abs(got - exact) / exact


def total_mass_error(ctx):
    grid = ctx.grid()
    exact = mu_alpha_total(ctx.params)
    got = grid.total_mass()
    return abs(got - exact) / exact


# ---------------------------------------------------------------------------
# exponents


def exponent_mean_ordering(ctx, p, n_balls=50, seed=0):
    """max violation of p_-(B) <= p_B <= <p>_B <= p_+(B) over sampled
    family balls (0 when the ordering holds everywhere)."""
    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    balls = [b for b in ctx.family().balls if np.any(grid.mask(b))]
    idx = rng.choice(len(balls), size=min(n_balls, len(balls)), replace=False)
    worst = 0.0
    for i in idx:
        b = balls[i]
        lo, hi = bounds_on(p, b, grid)
        pb = harmonic_mean_exponent(p, b, grid)
        pm = mean_exponent(p, b, grid)
        worst = max(worst, lo - pb, pb - pm, pm - hi)
    return worst


# ---------------------------------------------------------------------------
# norms


def random_fields(grid, count, seed, allow_sign=False):
    rng = np.random.default_rng(seed)
    z = grid.points[:, 0]
    out = []
    for j in range(count):
        acc = np.zeros(grid.size)
        for m in range(1, 4):
            a, b = rng.normal(size=2)
            acc = acc + a * np.real(z**m) + b * np.imag(z**m)
        acc = acc + rng.normal() * (1.0 - grid.radii**2) ** rng.uniform(0, 1)
        vals = acc if allow_sign else np.abs(acc)
        out.append(GridField(grid, vals, label=f"random{j}"))
    return out


def constant_norm_agreement(ctx, cases=20, seed=0):
    """(max relative error vs the closed-form constant-p norm, max
    |modular at the returned norm - 1|) over random cases."""
    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    fields = random_fields(grid, cases, seed)
    worst_rel, worst_mod = 0.0, 0.0
    for f in fields:
        p0 = float(rng.uniform(1.2, 4.0))
        w = None if rng.uniform() < 0.5 else ctx.weight
        res = luxemburg_norm(f, constant_exponent(p0), grid, weight=w)
        ref = constant_p_norm(f, p0, grid, weight=w)
        if ref > 0.0:
            worst_rel = max(worst_rel, abs(res.value - ref) / ref)
            worst_mod = max(worst_mod, abs(res.modular_at_value - 1.0))
    return worst_rel, worst_mod


def sandwich_violations(ctx, count=200, seed=0, slack=1e-8):
    """Violations of min(m^{1/p_-}, m^{1/p_+}) <= ||f|| <=
    max(m^{1/p_-}, m^{1/p_+}) with m the modular at scale 1."""
    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    pcorp = ctx.exponent_corpus()
    wcand = [None, ctx.weight]
    fields = random_fields(grid, count, seed)
    bad = 0
    for f in fields:
        p = pcorp[int(rng.integers(0, len(pcorp)))]
        w = wcand[int(rng.integers(0, len(wcand)))]
        m = modular(f, p, grid, weight=w)
        norm = luxemburg_norm(f, p, grid, weight=w).value
        if not np.isfinite(m) or m <= 0.0 or not np.isfinite(norm):
            continue
        lo = min(m ** (1.0 / p.p_minus), m ** (1.0 / p.p_plus))
        hi = max(m ** (1.0 / p.p_minus), m ** (1.0 / p.p_plus))
        if norm < lo * (1.0 - slack) or norm > hi * (1.0 + slack):
            bad += 1
    return bad


def holder2_worst_ratio(ctx, count=200, seed=0):
    """max over random pairs of pairing(|f|,|g|) / (2 ||f||_{p,w}
    ||g||_{p',w'}); must stay <= 1."""
    from ..norms import holder_product_bound

    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    pcorp = ctx.exponent_corpus()
    fields = random_fields(grid, 2 * count, seed)
    worst = 0.0
    for j in range(count):
        f, g = fields[2 * j], fields[2 * j + 1]
        p = pcorp[int(rng.integers(0, len(pcorp)))]
        w = None if rng.uniform() < 0.5 else ctx.weight
        lhs, rhs = holder_product_bound(f, g, p, grid, weight=w)
        if rhs > 0.0 and np.isfinite(rhs):
            worst = max(worst, lhs / rhs)
    return worst


def gen_holder_worst_ratio(ctx, count=60, seed=0):
    """max of ||fg||_{p} / (||f||_{q} ||g||_{r}) over random splits
    1/p = 1/q + 1/r with q = p/theta, r = p/(1-theta)."""
    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    pcorp = ctx.exponent_corpus()
    fields = random_fields(grid, 2 * count, seed)
    worst = 0.0
    for j in range(count):
        f, g = fields[2 * j], fields[2 * j + 1]
        p = pcorp[int(rng.integers(0, len(pcorp)))]
        theta = float(rng.uniform(0.25, 0.75))
        fn = p.fn
        q = type(p)(name=f"{p.name}/th", fn=lambda pts, fn=fn: np.asarray(
            fn(pts), dtype=float) / theta,
            p_minus=p.p_minus / theta, p_plus=p.p_plus / theta)
        r = type(p)(name=f"{p.name}/(1-th)", fn=lambda pts, fn=fn: np.asarray(
            fn(pts), dtype=float) / (1.0 - theta),
            p_minus=p.p_minus / (1.0 - theta),
            p_plus=p.p_plus / (1.0 - theta))
        prod = GridField(grid, f.values * g.values)
        np_ = luxemburg_norm(prod, p, grid).value
        nf = luxemburg_norm(f, q, grid).value
        ng = luxemburg_norm(g, r, grid).value
        if nf * ng > 0.0:
            worst = max(worst, np_ / (nf * ng))
    return worst


def norm_scaling_error(ctx, count=30, seed=0):
    """max relative error of ||c f|| = |c| ||f|| over random scalings."""
    rng = np.random.default_rng(seed)
    grid = ctx.grid()
    pcorp = ctx.exponent_corpus()
    fields = random_fields(grid, count, seed)
    worst = 0.0
    for f in fields:
        p = pcorp[int(rng.integers(0, len(pcorp)))]
        c = float(rng.uniform(0.1, 10.0))
        n1 = luxemburg_norm(GridField(grid, c * f.values), p, grid).value
        n0 = luxemburg_norm(f, p, grid).value
        if n0 > 0.0:
            worst = max(worst, abs(n1 - c * n0) / (c * n0))
    return worst


def char_norm_ratios(ctx, p, weight=None, max_balls=500):
    """||chi_B||_{p(.),w} / mass(B)^{1/p_B} over family balls resolvable
    on the grid; mass = mu_alpha or the w-measure."""
    grid = ctx.grid()
    wv = None if weight is None else np.asarray(field_values(weight, grid),
                                                dtype=float)
    mw = grid.measure_weights
    ratios = []
    for b in ctx.family().balls[:max_balls]:
        idx = grid.mask(b)
        if not np.any(idx):
            continue
        mu = float(np.sum(mw[idx]))
        mass = mu if wv is None else float(np.sum(mw[idx] * wv[idx]))
        if mass <= 0.0 or not np.isfinite(mass):
            continue
        pv = np.asarray(p(grid.points[idx]), dtype=float)
        pb = mu / float(np.sum(mw[idx] / pv))
        chi = np.where(idx, 1.0, 0.0)
        norm = luxemburg_norm(chi, p, grid, weight=weight).value
        ratios.append(norm / mass ** (1.0 / pb))
    return np.asarray(ratios)


def subordinate_ratios(ctx, p, w, n_fields=8):
    """lb/||f|| for standard-corpus fields; the subordinate-norm bracket
    says these sit in (0, 2]."""
    grid = ctx.grid()
    dual = ctx.dual_corpus(p, w)
    fields = ctx.standard_corpus(p=p, weight=w)
    step = max(1, len(fields) // n_fields)
    out = []
    for f in fields[::step][:n_fields]:
        nf = luxemburg_norm(f, p, grid, weight=w).value
        if not np.isfinite(nf) or nf <= 0.0:
            continue
        lb = subordinate_norm_lb(f, p, w, dual, grid)
        out.append(lb / nf)
    return np.asarray(out)


# ---------------------------------------------------------------------------
# weight classes


def class_report(ctx, w, p, kind, refined=False, route="patch"):
    """One of the four class-constant reports; route 'grid' uses
    node-mask evaluation (required for sampled weights)."""
    quad = ctx.grid(refined) if route == "grid" else ctx.patch_cache
    if kind == "bekolle":
        return bekolle_constant(w, p, ctx.family(refined), quad)
    if kind == "bplus":
        return bplus_constant(w, p, ctx.family(refined), quad)
    if kind == "bplusplus":
        return bplusplus_constant(w, p, ctx.family(refined), quad)
    if kind == "muckenhoupt":
        fam = ctx.family(refined, class_b_only=False)
        return muckenhoupt_constant(w, p, fam, quad)
    raise ValueError(f"unknown class kind: {kind}")


def growth_ratio(base, refined):
    """refined/base estimate ratio; inf when only the refined one blew
    up, 1 when both are infinite (consistent blow-up)."""
    if not np.isfinite(base):
        return 1.0 if not np.isfinite(refined) else 0.0
    if base <= 0.0:
        return np.inf
    return refined / base


def class_stability(ctx, w, p, kind):
    base = class_report(ctx, w, p, kind, refined=False).estimate
    fine = class_report(ctx, w, p, kind, refined=True).estimate
    return base, fine, growth_ratio(base, fine)


def _clipped_double_average(patch, w, p, u_cut):
    """Double-average value of the patch ball with the boundary shell
    1 - |z| < u_cut excluded."""
    mask = (1.0 - patch.radii) > u_cut
    if not np.any(mask):
        return np.nan
    mw = patch.measure_weights[mask]
    pts = patch.points[mask]
    wv = np.asarray(w(pts), dtype=float)
    pv = np.asarray(p(pts), dtype=float)
    pcv = pv / (pv - 1.0)
    mu = float(np.sum(mw))
    pb = mu / float(np.sum(mw / pv))
    with np.errstate(over="ignore", divide="ignore"):
        wdv = np.minimum(wv ** (1.0 - pcv), 1e280)
        w_mean = float(np.sum(mw * wv)) / mu
        wd_mean = float(np.sum(mw * wdv)) / mu
        return w_mean * wd_mean ** (pb - 1.0)


def dyadic_ladder_values(ctx, w, p, j_lo=4, j_hi=10, angle=0.0):
    """Per-ball double-average values on the dyadic boundary ladder (the
    blow-up classifier's input).

    Each rung-j ball is integrated on its conforming patch with the
    boundary shell u < 4^{-j} clipped: the truncation depth is matched
    to the rung, one extra dyadic scale per step.  A weight whose
    boundary integrals converge is insensitive to the clip and the
    values level off; a divergent one keeps gaining mass at the moving
    cutoff and the values grow geometrically along the ladder.  (Any
    fixed relative-resolution rule saturates scale-invariantly and hides
    divergence in a j-independent level instead.)"""
    cache = ctx.patch_cache
    vals = []
    for j, ball in zip(range(j_lo, j_hi + 1),
                       dyadic_boundary_balls(j_lo, j_hi, angle)):
        try:
            v = _clipped_double_average(cache.get(ball), w, p, 4.0 ** (-j))
        except (OverflowError, FloatingPointError):
            v = np.inf
        vals.append(v)
    return np.asarray(vals)


def dyadic_slope(ctx, w, p, j_lo=4, j_hi=10):
    vals = dyadic_ladder_values(ctx, w, p, j_lo=j_lo, j_hi=j_hi)
    keep = ~np.isnan(vals)
    slope, label = classify_slope(vals[keep], j_lo=j_lo)
    return slope, label, vals


def tail_mass_ratios(ctx, w, p, j_near=10, j_far=4):
    """(ratio for w, ratio for w') of the boundary-shell masses
    integral_{|z| > 1-2^{-j_near}} v dmu over the same at j_far.

    A convergent boundary integral decays geometrically along the
    ladder, so the ratio is small; a divergent one keeps its mass at the
    quadrature cutoff and the ratio stays near 1."""
    grid = ctx.grid()
    out = []
    for fn in (w, dual_weight(w, p)):
        vals = np.asarray(field_values(fn, grid), dtype=float)
        mass = vals * grid.measure_weights
        near = float(np.sum(mass[grid.radii > 1.0 - 2.0**-j_near]))
        far = float(np.sum(mass[grid.radii > 1.0 - 2.0**-j_far]))
        out.append(near / far if far > 0.0 else 0.0)
    return tuple(out)


def duality_gap(ctx, w, p, max_balls=None):
    """max relative gap between per-ball products for (w, p) and
    (w', p') over the family (patch route)."""
    cache = ctx.patch_cache
    wd = dual_weight(w, p)
    pc = p.conjugate()
    worst = 0.0
    balls = ctx.family().balls
    if max_balls:
        balls = balls[:max_balls]
    for ball in balls:
        a = per_ball_product(w, p, ball, cache)
        b = per_ball_product(wd, pc, ball, cache)
        if np.isfinite(a) and np.isfinite(b) and max(a, b) > 0.0:
            worst = max(worst, abs(a - b) / max(a, b))
        elif np.isfinite(a) != np.isfinite(b):
            worst = np.inf
    return worst


# ---------------------------------------------------------------------------
# operators: maximal / regularization


def maximal_apply(ctx, refined=False):
    fam, grid = ctx.family(refined), ctx.grid(refined)
    return lambda f: ops.maximal_boundary(f, fam, grid)


def maximal_norm_estimate(ctx, p, w, refined=False, corpus=None):
    grid = ctx.grid(refined)
    corpus = corpus or ctx.standard_corpus(refined, p=p, weight=w)
    return ops.operator_norm_estimate(maximal_apply(ctx, refined), p, grid,
                                      corpus, weight=w)


def pplus_apply_map(ctx, fields, refined=False):
    """Evaluate the positive Bergman operator on every field in one
    batched pass; returns {label: GridField}."""
    grid = ctx.grid(refined)
    mat = np.stack([np.abs(np.asarray(field_values(f, grid), dtype=float))
                    for f in fields])
    out = ops.bergman_corpus(mat, grid, positive=True)
    return {f.label: GridField(grid, out[i], label=f"P+[{f.label}]")
            for i, f in enumerate(fields)}


def pplus_norm_estimate(ctx, p, w, refined=False, corpus=None):
    grid = ctx.grid(refined)
    corpus = corpus or ctx.standard_corpus(refined, p=p, weight=w)
    applied = pplus_apply_map(ctx, corpus, refined)
    apply_fn = lambda f: applied[f.label]
    return ops.operator_norm_estimate(apply_fn, p, grid, corpus, weight=w)


def commutation_ratios(ctx, k, n_seeds=10, seed=0):
    """(max m f / m R f, max R(m g)/m g, max m g / R(m g)) over positive
    seed fields; all three are bounded by the commutation constant."""
    grid = ctx.grid()
    fam = ctx.family()
    fields = ctx.seed_fields(count=n_seeds, seed=seed)
    c_fwd = c_hi = c_lo = 0.0
    for f in fields:
        mf = ops.maximal_boundary(f, fam, grid).values
        rf = ops.regularize(f, k, grid).values
        mrf = ops.maximal_boundary(GridField(grid, rf), fam, grid).values
        rmf = ops.regularize(GridField(grid, mf), k, grid).values
        cov = (mf > 0) & (mrf > 0)
        c_fwd = max(c_fwd, float(np.max(mf[cov] / mrf[cov])))
        cov = (mf > 0) & (rmf > 0)
        c_hi = max(c_hi, float(np.max(rmf[cov] / mf[cov])))
        c_lo = max(c_lo, float(np.max(mf[cov] / rmf[cov])))
    return c_fwd, c_hi, c_lo


def selfadjoint_worst_ratio(ctx, k, n_pairs=10, seed=0):
    """max over non-negative pairs of (integral f R_k g) / (integral
    g R_k f)."""
    grid = ctx.grid()
    fields = ctx.seed_fields(count=2 * n_pairs, seed=seed)
    worst = 0.0
    for j in range(n_pairs):
        f, g = fields[2 * j], fields[2 * j + 1]
        rg = ops.regularize(g, k, grid)
        rf = ops.regularize(f, k, grid)
        num = pairing(f, rg, ctx.grid())
        den = pairing(g, rf, ctx.grid())
        if den > 0.0:
            worst = max(worst, num / den)
    return worst


def pointwise_power_ratio(ctx, k, p, w, n_fields=8, seed=0):
    """max_z (R_k g)^{p(z)} / (R_k(g^{p(.)}) + 1) for fields normalized
    to unit weighted norm."""
    grid = ctx.grid()
    pv = np.asarray(p(grid.points), dtype=float)
    fields = ctx.seed_fields(count=n_fields, seed=seed)
    worst = 0.0
    for f in fields:
        norm = luxemburg_norm(f, p, grid, weight=w).value
        if not np.isfinite(norm) or norm <= 0.0:
            continue
        g = np.asarray(f.values, dtype=float) / norm
        rg = ops.regularize(GridField(grid, g), k, grid).values
        rgp = ops.regularize(GridField(grid, g**pv), k, grid).values
        ratio = rg**pv / (rgp + 1.0)
        worst = max(worst, float(np.max(ratio)))
    return worst


def transfer_ratio(ctx, k, w, p, refined=False):
    """[R_k w]_{all-ball product} / [w]_{boundary product}, both on the
    node-mask route so the regularized (sampled) weight is admissible."""
    from ..weights import grid_weight

    grid = ctx.grid(refined)
    wv = np.asarray(field_values(w, grid), dtype=float)
    rw = ops.regularize(GridField(grid, wv), k, grid)
    rw_weight = grid_weight(rw, f"reg[{getattr(w, 'name', 'w')}]")
    fam_all = ctx.family(refined, class_b_only=False)
    num = muckenhoupt_constant(rw_weight, p, fam_all, grid).estimate
    den = bekolle_constant(w, p, ctx.family(refined), grid).estimate
    if not np.isfinite(den) or den <= 0.0:
        return np.inf
    return num / den


def norm_transfer_ratios(ctx, k, p, w, n_fields=6, seed=0):
    """(max ||R_k g . w^{1/p}||_p / ||g . (R_k w)^{1/p}||_p,
       max ||R_k g||_{p',w'} / ||g||_{p',sigma'}) with sigma = R_k w."""
    from ..weights import grid_weight

    grid = ctx.grid()
    pv = np.asarray(p(grid.points), dtype=float)
    pcv = pv / (pv - 1.0)
    wv = np.asarray(field_values(w, grid), dtype=float)
    rw = ops.regularize(GridField(grid, wv), k, grid).values
    fields = ctx.seed_fields(count=n_fields, seed=seed)
    pc = p.conjugate()
    wdual = np.minimum(wv ** (1.0 - pcv), 1e280)
    sigma_dual = np.minimum(rw ** (1.0 - pcv), 1e280)
    c1 = c2 = 0.0
    for f in fields:
        g = np.asarray(f.values, dtype=float)
        rg = ops.regularize(f, k, grid).values
        n1 = luxemburg_norm(rg * wv ** (1.0 / pv), p, grid).value
        d1 = luxemburg_norm(g * rw ** (1.0 / pv), p, grid).value
        if d1 > 0.0 and np.isfinite(d1):
            c1 = max(c1, n1 / d1)
        n2 = luxemburg_norm(rg, pc, grid, weight=wdual).value
        d2 = luxemburg_norm(g, pc, grid, weight=sigma_dual).value
        if d2 > 0.0 and np.isfinite(d2):
            c2 = max(c2, n2 / d2)
    return c1, c2


# ---------------------------------------------------------------------------
# twin-ball search


def twin_ball_scaled(ctx, ball, c, seed=0):
    """Scale-free twin-ball statistic: min |P_alpha chi_B| on the
    companion times (cR)^{n+alpha} / mu_alpha(B)."""
    stat, mate = ops.twin_ball_statistic(ball, c, ctx.patch_cache, seed=seed)
    mu = ctx.patch_cache.get(ball).total_mass()
    npow = ctx.params.n + ctx.params.alpha
    return stat * (c * ball.radius) ** npow / mu, mate


def twin_ball_search(ctx, balls, c_grid=(0.5, 1.0, 1.5), seed=0):
    """Best (statistic, c) per ball over the companion-distance grid."""
    out = []
    for b in balls:
        best = (0.0, None)
        for c in c_grid:
            try:
                val, _ = twin_ball_scaled(ctx, b, c, seed=seed)
            except ValueError:
                continue
            if val > best[0]:
                best = (val, c)
        out.append(best)
    return out


def twin_ball_probe_balls(depth_js=(3, 4, 5), angles=(0.0, 2.0, 4.0)):
    """Small-radius boundary-touching balls for the twin-ball check."""
    out = []
    for j in depth_js:
        r = 2.0 ** (-j)
        for th in angles:
            out.append(PseudoBall(((1.0 - r) * np.exp(1j * th),), 1.5 * r))
    return out


# ---------------------------------------------------------------------------
# iterations / factorization / extrapolation


def iteration_property_stats(ctx, n_seeds=20, K=8, Mhat=2.0, seed=0):
    """Maxima over seeds of the three majorant-iteration violations:
    (a) pointwise lower bound |h| <= series, reported as max(|h|/series);
    (b) norm growth ||series|| / ||h|| (should stay near <= 2);
    (c) maximal-bound defect max(m(series) / (2 Mhat series + tail))."""
    grid = ctx.grid()
    fam = ctx.family()
    p = ctx.exponent
    w = ctx.weight
    fields = ctx.seed_fields(count=n_seeds, seed=seed)
    worst_a = 0.0
    worst_b = 0.0
    worst_c = 0.0
    for h in fields:
        it = ops.rdf_iterate_R(h, fam, grid, K=K, Mhat=Mhat)
        hv = np.abs(np.asarray(h.values, dtype=float))
        sv = it.values
        worst_a = max(worst_a, float(np.max(hv / sv)))
        nh = luxemburg_norm(h, p, grid, weight=w).value
        ns = luxemburg_norm(sv, p, grid, weight=w).value
        if nh > 0.0:
            worst_b = max(worst_b, ns / nh)
        ms = ops.maximal_boundary(GridField(grid, sv), fam, grid).values
        cov = ms > 0.0
        allowed = 2.0 * Mhat * sv[cov] + it.next_term[cov]
        worst_c = max(worst_c, float(np.max(ms[cov] / allowed)))
    return {"a_max_ratio": worst_a, "b_max_norm_growth": worst_b,
            "c_max_defect": worst_c}


def extrapolation_pairs(ctx, p, w, p0, chat, count=50, tol=1e-3, seed=0):
    """Ratio statistic of the constant-to-variable transfer: max over
    pairs (F, G) = (P+ f, |f|) of ||F||_{p,w} / (16 4^{-1/p0}
    chat^{1/p0} ||G||_{p,w}); also returns the skipped-pair count."""
    grid = ctx.grid()
    fields = list(ctx.standard_corpus(p=p, weight=w))
    extra = ctx.seed_fields(count=max(0, count - len(fields)), seed=seed)
    fields = (fields + extra)[:count]
    applied = pplus_apply_map(ctx, fields)
    prefac = 16.0 * 4.0 ** (-1.0 / p0) * chat ** (1.0 / p0)
    worst = 0.0
    skipped = 0
    errors = 0
    for f in fields:
        gv = np.abs(np.asarray(field_values(f, grid), dtype=float))
        ng = luxemburg_norm(gv, p, grid, weight=w).value
        nf = luxemburg_norm(applied[f.label], p, grid, weight=w).value
        if ng == 0.0:
            if nf > 0.0:
                errors += 1
            else:
                skipped += 1
            continue
        worst = max(worst, nf / (prefac * ng))
    return worst, skipped, errors


def p0_sweep(ctx, p0, weight_names, corpus=None):
    """[(bekolle constant at p0, P+ operator-norm estimate in
    L^{p0}(v))] per sweep weight v; calibration input for the
    constant-exponent bound function."""
    from .context import resolve_weight

    p = constant_exponent(p0)
    rows = []
    for name in weight_names:
        v = resolve_weight(name)
        t = bekolle_constant(v, p, ctx.family(), ctx.patch_cache).estimate
        est = pplus_norm_estimate(ctx, p, v, corpus=corpus)
        rows.append({"weight": name, "class_constant": t,
                     "pplus_norm": est.value})
    return rows
