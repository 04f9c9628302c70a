"""Grid operators: maximal averages, ball regularization, Bergman-type
kernel integrals, and the geometric-series iterations used by the
factorization and extrapolation machinery.

All operators act on node-sampled fields of a fixed quadrature grid and
are deterministic given the grid and ball family.  Maximal functions
take per-ball node averages (mask-based); regularization averages over
the relative ball of radius k(1-|z|) around each node (each node lies
in its own ball, so the average is always well defined); Bergman-type
operators evaluate the kernel exactly and refine the quadrature cells
of near-diagonal source nodes.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import PseudoBall
from .norms import luxemburg_norm
from .quadrature import GridField, field_values, integrate

NEAR_PAIR_CACHE_LIMIT = 30_000_000


@dataclass(frozen=True)
class OperatorConfig:
    """Knobs for the operator layer.

    k            — regularization ball scale, in (0, 1); the widened-scale
                   lemmas need k < 1/2
    K            — truncation depth of geometric-series iterations
    Mhat         — stand-in upper bound for the driving operator norm
    kernel_eta_factor — near-diagonal threshold, in local node spacings
    refine_depth — dyadic cell-subdivision depth for near-diagonal cells
    """

    k: float = 0.25
    K: int = 8
    Mhat: float = None
    kernel_eta_factor: float = 10.0
    refine_depth: int = 3

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise ValueError("k must lie in (0, 1)")
        if self.K < 1:
            raise ValueError("K must be >= 1")


# ---------------------------------------------------------------------------
# family-ball averages and maximal functions


def _family_structure(family, grid):
    """Cached per-ball (node indices, measure weights, mass) for a family
    on a grid."""
    cache = getattr(grid, "_family_cache", None)
    if cache is None:
        cache = {}
        grid._family_cache = cache
    key = (family.descriptor, len(family))
    entry = cache.get(key)
    if entry is None:
        mw = grid.measure_weights
        idxs, wts, mus = [], [], []
        for ball in family:
            m = ball.contains(grid.points)
            idx = np.flatnonzero(m)
            w = mw[idx]
            idxs.append(idx)
            wts.append(w)
            mus.append(float(np.sum(w)))
        entry = (idxs, wts, mus)
        cache[key] = entry
    return entry


def ball_averages(f, family, grid):
    """mu_alpha-average of |f| over each family ball (masked nodes);
    empty balls get nan."""
    vals = np.abs(field_values(f, grid))
    idxs, wts, mus = _family_structure(family, grid)
    out = np.empty(len(idxs))
    for i, (idx, w, mu) in enumerate(zip(idxs, wts, mus)):
        out[i] = np.dot(vals[idx], w) / mu if mu > 0.0 else np.nan
    return out


def _maximal(f, family, grid):
    vals = np.abs(field_values(f, grid))
    idxs, wts, mus = _family_structure(family, grid)
    out = np.zeros(grid.size)
    for idx, w, mu in zip(idxs, wts, mus):
        if mu <= 0.0 or idx.size == 0:
            continue
        avg = np.dot(vals[idx], w) / mu
        np.maximum.at(out, idx, avg)
    return GridField(grid=grid, values=out, label="maximal")


def maximal_boundary(f, family, grid):
    """At each node, the best average of |f| over family balls containing
    it; nodes covered by no family ball get 0.  Use with a
    boundary-touching family."""
    if not family.descriptor.class_b_only:
        raise ValueError("expected a boundary-touching family; use "
                         "maximal_full for unfiltered families")
    return _maximal(f, family, grid)


def maximal_full(f, family, grid):
    """Unfiltered-family variant of the maximal average."""
    if family.descriptor.class_b_only:
        raise ValueError("expected an unfiltered family")
    return _maximal(f, family, grid)


# ---------------------------------------------------------------------------
# regularization


def _regularization_structure(grid, k):
    """CSR neighbor structure: for each node i, the indices of nodes
    inside B(z_i, k(1-|z_i|)).  Cached on the grid per k; falls back to
    None when the pair count would be excessive."""
    cache = getattr(grid, "_reg_cache", None)
    if cache is None:
        cache = {}
        grid._reg_cache = cache
    if k in cache:
        return cache[k]
    radii = grid.radii
    z = grid.points[:, 0] if grid.params.n == 1 else None
    counts = np.zeros(grid.size + 1, dtype=np.int64)
    rows = []
    total = 0
    for i in range(grid.size):
        idx = _reg_ball_members(grid, z, radii, i, k)
        rows.append(idx)
        total += idx.size
        counts[i + 1] = total
        if total > NEAR_PAIR_CACHE_LIMIT:
            cache[k] = None
            return None
    data = np.concatenate(rows)
    cache[k] = (data, counts)
    return cache[k]


def _reg_ball_members(grid, z, radii, i, k):
    rad = k * (1.0 - radii[i])
    if grid.params.n == 1:
        d = np.abs(radii - radii[i]) + np.abs(1.0 - z[i] * np.conj(z) /
                                              (radii[i] * radii))
    else:
        inner = np.sum(grid.points * np.conj(grid.points[i]), axis=1)
        d = np.abs(radii - radii[i]) + np.abs(1.0 - inner / (radii[i] * radii))
    return np.flatnonzero(d < rad)


def regularize(f, k, grid):
    """Average of f over the relative ball B(z, k(1-|z|)) at each node.

    Linear in f; reproduces constants exactly (each node's ball contains
    the node itself)."""
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie in (0, 1)")
    vals = field_values(f, grid)
    mw = grid.measure_weights
    struct = _regularization_structure(grid, k)
    if struct is not None:
        data, indptr = struct
        num = np.add.reduceat(np.asarray(vals * mw)[data], indptr[:-1])
        den = np.add.reduceat(mw[data], indptr[:-1])
        empty = indptr[1:] == indptr[:-1]
        num[empty] = 0.0
        den[empty] = 1.0
        return GridField(grid=grid, values=num / den, label="regularized")
    out = np.empty(grid.size)
    radii = grid.radii
    z = grid.points[:, 0] if grid.params.n == 1 else None
    fm = np.asarray(vals * mw)
    for i in range(grid.size):
        idx = _reg_ball_members(grid, z, radii, i, k)
        out[i] = np.sum(fm[idx]) / np.sum(mw[idx])
    return GridField(grid=grid, values=out, label="regularized")


# ---------------------------------------------------------------------------
# Bergman-type kernel operators


def _cell_structure(grid):
    """Cached cell bookkeeping (n = 1): maps each node to its quadrature
    cell (radial panel x angular sector), lists cell members, and gives a
    per-node local spacing (radial node gap + angular arc)."""
    struct = getattr(grid, "_cell_struct", None)
    if struct is not None:
        return struct
    keys = np.stack([grid.panel_lo, grid.sector_lo], axis=1)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    sorted_inv = inv[order]
    starts = np.searchsorted(sorted_inv, np.arange(uniq.shape[0]))
    stops = np.append(starts[1:], inv.size)
    members = [order[a:b] for a, b in zip(starts, stops)]
    counts = np.array([m.size for m in members])
    spacing = (grid.panel_hi - grid.panel_lo) / counts[inv] + \
        grid.radii * (grid.sector_hi - grid.sector_lo)
    struct = (inv, members, spacing)
    grid._cell_struct = struct
    return struct


def _refined_cell_sum(grid, cells, members, z_out, power, f_vals,
                      callable_f, positive, depth_levels):
    """Replacement quadrature for the given cells against one output
    point: each cell is subdivided dyadically, with composite
    Gauss-Legendre nodes in radius and midpoints in angle.  Node-sampled
    fields are extended radially by nearest member node."""
    depth = 2 ** depth_levels
    gx, gw = _GL3
    alpha = grid.params.alpha
    total = 0.0 if positive else 0.0 + 0.0j
    for c in cells:
        idx = members[c]
        j = idx[0]
        lo, hi = grid.panel_lo[j], grid.panel_hi[j]
        tl, th = grid.sector_lo[j], grid.sector_hi[j]
        redges = np.linspace(lo, hi, depth + 1)
        rmid = 0.5 * (redges[:-1] + redges[1:])
        rhalf = 0.5 * (hi - lo) / depth
        rm = (rmid[:, None] + rhalf * gx).ravel()
        rw = np.broadcast_to(rhalf * gw, (depth, gx.size)).ravel()
        tm = tl + (th - tl) * (np.arange(depth) + 0.5) / depth
        dt = (th - tl) / depth
        rr, tt = np.meshgrid(rm, tm, indexing="ij")
        pts = (rr * np.exp(1j * tt)).ravel()
        dens = (((1.0 - rr) * (1.0 + rr)) ** (alpha - 1.0)).ravel()
        lw = (rr * rw[:, None] * dt).ravel()
        if callable_f is not None:
            fv = np.asarray(callable_f(pts.reshape(-1, 1)))
        else:
            nearest = np.argmin(np.abs(rm[:, None] -
                                       grid.radii[idx][None, :]), axis=1)
            fv = np.repeat(f_vals[idx][nearest], depth)
        base = 1.0 - z_out * np.conj(pts)
        kern = np.abs(base) ** (-power) if positive else base ** (-power)
        fv = np.abs(fv) if positive else fv
        total += np.sum(kern * fv * dens * lw)
    return total


def _ring_structure(grid):
    """Cached (n = 1): groups grid nodes into rings of equal radius
    sharing the uniform angular sector layout.  Returns (ring radii,
    node index table (rings x sectors), per-ring radial weight, angular
    pitch, sector count)."""
    struct = getattr(grid, "_ring_struct", None)
    if struct is not None:
        return struct
    if grid.panel_lo is None or grid.params.n != 1:
        raise ValueError("ring evaluation needs an n = 1 polar grid")
    radii, inv = np.unique(grid.radii, return_inverse=True)
    nrings = radii.size
    A = grid.size // nrings
    if nrings * A != grid.size:
        raise ValueError("grid is not a radial x angular tensor")
    pitch = float(grid.sector_hi[0] - grid.sector_lo[0])
    cols = np.rint(grid.sector_lo / pitch).astype(int) % A
    node_index = np.empty((nrings, A), dtype=np.int64)
    node_index[inv, cols] = np.arange(grid.size)
    ring_w = grid.measure_weights[node_index[:, 0]] / pitch
    spread = np.max(np.abs(grid.measure_weights[node_index] -
                           (ring_w * pitch)[:, None]))
    if spread > 1e-10 * np.max(grid.measure_weights):
        raise ValueError("ring weights are not angularly uniform")
    struct = (radii, node_index, ring_w, pitch, A)
    grid._ring_struct = struct
    return struct


_GL3 = np.polynomial.legendre.leggauss(3)
_GL6 = np.polynomial.legendre.leggauss(6)
SECTOR_EXACT_SIGMA_FACTOR = 4.0
SECTOR_EXACT_KMAX = 10


def _angular_primitive(x, c, power):
    """F(x) = integral over [0, x] of ((1-c)^2 + 4 c sin^2(d/2))^{-P/2},
    broadcast over arrays.  Substituting sin(d/2) = lambda sinh(s) with
    lambda = (1-c)/(2 sqrt(c)) flattens the near-peak spike into a
    smooth cosh power, integrated on fixed panels."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    lam = (1.0 - c) / (2.0 * np.sqrt(c))
    s_end = np.arcsinh(np.sin(0.5 * x) / lam)
    s_cut = 40.0 / max(power - 1.0, 0.5)
    s_hi = np.minimum(s_end, s_cut)
    xs, ws = _GL6
    npanels = 16
    frac = np.linspace(0.0, 1.0, npanels + 1)
    val = np.zeros(np.broadcast(x, c).shape)
    for fa, fb in zip(frac[:-1], frac[1:]):
        a = s_hi * fa
        b = s_hi * fb
        mid = 0.5 * (a + b)[..., None]
        half = 0.5 * (b - a)[..., None]
        s = mid + half * xs
        u = lam[..., None] * np.sinh(s)
        integ = np.cosh(s) ** (1.0 - power) / np.sqrt(
            np.maximum(1.0 - u * u, 1e-300))
        val = val + np.einsum("...k,k->...", integ, ws) * half[..., 0]
    return 2.0 * lam * (1.0 - c) ** (-power) * val


def _ring_kernel(c, pitch, A, power, positive):
    """Angular kernel vector per ring pair: entry k is the sector-mean
    of the kernel at relative angle k * pitch.  For the modulus kernel,
    ring pairs whose argument scale 1 - c drops below a few pitches get
    exact sector integrals on the near-peak windows; elsewhere (and for
    the signed kernel) the midpoint value is used."""
    k = np.arange(A)
    ang = np.exp(-1j * pitch * k)
    base = 1.0 - c[..., None] * ang
    if not positive:
        return base ** (-power)
    kv = np.abs(base) ** (-power)
    sigma = 1.0 - c
    deep = sigma < SECTOR_EXACT_SIGMA_FACTOR * pitch
    kmax = min(SECTOR_EXACT_KMAX, A // 2 - 1)
    if np.any(deep) and kmax >= 0:
        cd = c[deep]
        hi_edges = (np.arange(kmax + 1) + 0.5) * pitch
        F = _angular_primitive(hi_edges[None, :], cd[:, None], power)
        lows = np.concatenate([-F[:, :1], F[:, :-1]], axis=1)
        means = (F - lows) / pitch
        kvd = kv[deep]
        kvd[:, :kmax + 1] = means
        if kmax >= 1:
            kvd[:, A - kmax:] = means[:, 1:][:, ::-1]
        kv[deep] = kvd
    return kv


def bergman_corpus(field_matrix, grid, positive=True, ring_chunk=64):
    """Batched full-grid kernel application (n = 1): rows of
    ``field_matrix`` are node samplings; returns matching rows of the
    kernel integral at the grid nodes.  The angular direction is handled
    as a circular correlation per ring pair via FFT, so one kernel pass
    serves every row."""
    radii, node_index, ring_w, pitch, A = _ring_structure(grid)
    fields = np.atleast_2d(np.asarray(field_matrix))
    if positive:
        fields = np.abs(fields).astype(float)
    power = grid.params.n + grid.params.alpha
    nrings = radii.size
    fr = fields[:, node_index.ravel()].reshape(fields.shape[0], nrings, A)
    fr = fr * (ring_w[:, None] * pitch)
    if positive:
        fhat = np.fft.rfft(fr, axis=-1)
    else:
        fhat = np.fft.fft(fr, axis=-1)
    out = np.empty((fields.shape[0], grid.size),
                   dtype=float if positive else complex)
    for a0 in range(0, nrings, ring_chunk):
        a1 = min(a0 + ring_chunk, nrings)
        c = radii[a0:a1, None] * radii[None, :]
        kv = _ring_kernel(c, pitch, A, power, positive)
        if positive:
            khat = np.fft.rfft(kv, axis=-1)
            ohat = np.einsum("arw,nrw->naw", khat, fhat)
            rings_out = np.fft.irfft(ohat, n=A, axis=-1)
        else:
            khat = np.fft.fft(kv, axis=-1)
            khat_rev = khat[..., (A - np.arange(A)) % A]
            ohat = np.einsum("arw,nrw->naw", khat_rev, fhat)
            rings_out = np.fft.ifft(ohat, axis=-1)
        idx = node_index[a0:a1].ravel()
        out[:, idx] = rings_out.reshape(fields.shape[0], -1)
    return out


def bergman(f, grid, out_points=None, config=None, positive=False,
            chunk=None):
    """Kernel integral of f: at z, the integral of
    f(zeta) / (1 - <z, zeta>)^{n+alpha} d mu_alpha(zeta)
    (modulus kernel when positive=True).

    With explicit ``out_points``, source cells whose kernel argument
    drops below eta_factor * local node spacing are re-integrated on a
    dyadically subdivided cell (whole cells at a time, so the one-node
    shares are replaced consistently).  With ``out_points=None`` (n = 1
    polar grids) the integral is evaluated at every grid node through
    the ring-FFT path, whose angular rule integrates the kernel exactly
    over each sector near the diagonal.
    """
    config = config or OperatorConfig()
    vals = np.asarray(field_values(f, grid))
    mw = grid.measure_weights
    total = float(np.sum(np.abs(vals) * mw))
    if not np.isfinite(total):
        raise ValueError("field is not integrable against mu_alpha")
    power = grid.params.n + grid.params.alpha
    if out_points is None:
        res = bergman_corpus(vals.reshape(1, -1), grid, positive=positive)
        label = ("kernel-positive" if positive else "kernel") + ":" + \
            getattr(f, "label", "")
        return GridField(grid=grid, values=res[0], label=label)
    callable_f = f if callable(f) and not isinstance(f, GridField) else None
    has_cells = (grid.panel_lo is not None and grid.params.n == 1)
    zout = np.asarray(out_points, dtype=complex).reshape(-1, grid.params.n)
    src = grid.points
    if chunk is None:
        chunk = max(32, int(4e6 / max(grid.size, 1)))
    if has_cells:
        inv, members, spacing = _cell_structure(grid)
        eta = config.kernel_eta_factor * spacing
        if callable_f is None:
            fnz = vals != 0.0
            cell_live = np.zeros(len(members), dtype=bool)
            np.logical_or.at(cell_live, inv, fnz)
        else:
            cell_live = np.ones(len(members), dtype=bool)
    out = np.empty(zout.shape[0], dtype=float if positive else complex)
    fw = (np.abs(vals) if positive else vals) * mw
    for a in range(0, zout.shape[0], chunk):
        zb = zout[a:a + chunk]
        base = 1.0 - zb @ np.conj(src).T  # (b, N)
        absb = np.abs(base)
        kern = absb ** (-power) if positive else base ** (-power)
        block = kern @ fw
        if has_cells:
            for bi in range(zb.shape[0]):
                near = np.flatnonzero(absb[bi] < eta)
                if near.size == 0:
                    continue
                cells = np.unique(inv[near])
                cells = cells[cell_live[cells]]
                if cells.size == 0:
                    continue
                nodes = np.concatenate([members[c] for c in cells])
                block[bi] -= np.sum(kern[bi, nodes] * fw[nodes])
                block[bi] += _refined_cell_sum(
                    grid, cells, members, zb[bi, 0], power, vals,
                    callable_f, positive, config.refine_depth)
        out[a:a + chunk] = block.real if positive else block
    return out


def bergman_positive(f, grid, out_points=None, config=None, chunk=None):
    """Modulus-kernel companion of ``bergman``; dominates it pointwise."""
    return bergman(f, grid, out_points=out_points, config=config,
                   positive=True, chunk=chunk)


def mean_value_probe(r, params, spec, count=100, seed=0):
    """Constancy probe: the kernel integral of
    f = (1-|zeta|^2)^{1-alpha} chi_{B(0,r)} is constant, equal to the
    Lebesgue area pi r^2 (n = 1).  Returns (value at 0, max relative
    spread over sampled evaluation points)."""
    from dataclasses import replace

    from .geometry import sample_points
    from .quadrature import build_grid

    if params.n != 1:
        raise ValueError("probe implemented for n = 1")
    grid = build_grid(params, replace(spec, breakpoints=tuple(
        sorted(set(spec.breakpoints) | {r}))))

    def f(pts):
        m2 = np.sum(np.abs(pts) ** 2, axis=1)
        return np.where(m2 < r * r, (1.0 - m2) ** (1.0 - params.alpha), 0.0)

    rng = np.random.default_rng(seed)
    zs = sample_points(count, rng, n=1, max_modulus=1.0 - 1e-6)
    at0 = bergman(f, grid, out_points=np.array([[0.0 + 0.0j]]))[0]
    atz = bergman(f, grid, out_points=zs)
    spread = float(np.max(np.abs(atz - at0)) / np.abs(at0))
    return float(at0.real), spread


# ---------------------------------------------------------------------------
# operator norm estimation


@dataclass
class OperatorNormEstimate:
    value: float
    argmax_label: str
    ratios: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value": self.value, "argmax_label": self.argmax_label,
                "ratios": dict(self.ratios)}


def operator_norm_estimate(apply_fn, p, grid, corpus, weight=None,
                           norm_tol=1e-9):
    """max over corpus fields of ||T f|| / ||f|| in the weighted
    variable-exponent norm; a lower bound of the true operator norm."""
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    ratios = {}
    best, best_label = 0.0, None
    nonzero = 0
    for fld in corpus:
        nf = luxemburg_norm(fld, p, grid, weight=weight, tol=norm_tol)
        if nf.value == 0.0:
            continue
        nonzero += 1
        tf = apply_fn(fld)
        ntf = luxemburg_norm(tf, p, grid, weight=weight, tol=norm_tol)
        ratio = ntf.value / nf.value if np.isfinite(nf.value) else 0.0
        label = getattr(fld, "label", "") or f"field{nonzero}"
        ratios[label] = ratio
        if ratio > best:
            best, best_label = ratio, label
    if nonzero == 0:
        raise ValueError("corpus contains only zero fields")
    return OperatorNormEstimate(value=best, argmax_label=best_label,
                                ratios=ratios)


# ---------------------------------------------------------------------------
# geometric-series iterations


@dataclass
class IterationResult:
    """Truncated geometric series sum(iterates[k] / (2 Mhat)^k, k <= K)
    with the exact k = 0 term |h|, plus the truncation diagnostics."""

    field: GridField
    Mhat: float
    K: int
    tail_ratio: float        # max over covered nodes of next-term / sum
    next_term: np.ndarray

    @property
    def values(self):
        return self.field.values


def _iterate_series(h_vals, apply_once, K, Mhat, grid, label):
    term = np.abs(np.asarray(h_vals, dtype=float))
    total = term.copy()
    for _ in range(K):
        term = apply_once(term) / (2.0 * Mhat)
        total += term
    nxt = apply_once(term)  # (2 Mhat)^{-K} * iterate^{K+1}
    covered = total > 0.0
    tail = float(np.max(nxt[covered] / ((2.0 * Mhat) * total[covered]))) \
        if np.any(covered) else 0.0
    return IterationResult(field=GridField(grid=grid, values=total,
                                           label=label),
                           Mhat=Mhat, K=K, tail_ratio=tail, next_term=nxt)


def rdf_iterate_R(h, family, grid, K=8, Mhat=2.0):
    """Majorant series driven by the boundary maximal average:
    sum of iterated maximal applications of |h| scaled by (2 Mhat)^{-k}.

    The k = 0 term is |h| itself, so |h| <= result holds exactly; the
    truncation remainder is reported as ``tail_ratio``."""

    def step(vals):
        return _maximal(vals, family, grid).values

    return _iterate_series(field_values(h, grid), step, K, Mhat, grid,
                           label="rdf-majorant")


def rdf_iterate_H(h, p, w, family, grid, K=8, Mhat=2.0):
    """Dual-space majorant: runs the maximal series on h * w^{1/p} and
    divides the k >= 1 part by w^{1/p}, keeping the k = 0 term equal to
    |h| exactly.  Returns (result for h, result for h * w^{1/p})."""
    wv = field_values(w, grid)
    pv = p(grid.points)
    wfrac = wv ** (1.0 / pv)
    hv = np.abs(np.asarray(field_values(h, grid), dtype=float))
    inner = _iterate_series(hv * wfrac, lambda v: _maximal(v, family,
                                                           grid).values,
                            K, Mhat, grid, label="rdf-dual-inner")
    rest = np.maximum(inner.values - hv * wfrac, 0.0)
    out_vals = hv + rest / wfrac
    outer = GridField(grid=grid, values=out_vals, label="rdf-dual")
    return IterationResult(field=outer, Mhat=Mhat, K=K,
                           tail_ratio=inner.tail_ratio,
                           next_term=inner.next_term), inner


# ---------------------------------------------------------------------------
# the two-weight sublinear operators and the factorization


def s_operators(w, p0, family, grid):
    """(apply_S1, apply_S2) for a constant exponent p0 > 1 and weight w:
    S1 f = w^{1/q} (max-avg(f^{p0'} w^{-1/p0}))^{1/p0'},
    S2 f = w'^{1/q} (max-avg(f^{p0} w'^{-1/p0'}))^{1/p0},
    with q = p0 p0' and w' = w^{1-p0'}."""
    if p0 <= 1.0:
        raise ValueError("p0 must exceed 1")
    p0c = p0 / (p0 - 1.0)
    q = p0 * p0c
    wv = field_values(w, grid)
    wdv = wv ** (1.0 - p0c)

    def apply_s1(vals):
        vals = np.abs(np.asarray(vals, dtype=float))
        inner = _maximal(vals**p0c * wv ** (-1.0 / p0), family, grid).values
        return wv ** (1.0 / q) * inner ** (1.0 / p0c)

    def apply_s2(vals):
        vals = np.abs(np.asarray(vals, dtype=float))
        inner = _maximal(vals**p0 * wdv ** (-1.0 / p0c), family, grid).values
        return wdv ** (1.0 / q) * inner ** (1.0 / p0)

    return apply_s1, apply_s2


@dataclass
class FactorizationResult:
    w1: GridField
    w2: GridField
    majorant: IterationResult
    identity_max_rel_err: float
    p0: float
    Mhat: float
    warning: str = None

    def b1_bounds(self):
        """Certified bounds (2 Mhat)^{p0} and (2 Mhat)^{p0'} inflated by
        the measured truncation tail."""
        p0c = self.p0 / (self.p0 - 1.0)
        infl = (1.0 + self.majorant.tail_ratio)
        return ((2.0 * self.Mhat * infl) ** self.p0,
                (2.0 * self.Mhat * infl) ** p0c)


def jones_factorize(w, p0, h, family, grid, K=8, Mhat=None,
                    norm_corpus=None):
    """Split w = w1 * w2^{1-p0} with both factors controlled by the
    pointwise-maximal class.

    Runs the geometric series driven by S = S1 + S2 on the seed h
    (normalized in L^q), then returns
    w1 = (series)^{p0} * w'^{-1/p0'},  w2 = (series)^{p0'} * w^{-1/p0}.
    The splitting identity holds pointwise by pure algebra.
    """
    p0c = p0 / (p0 - 1.0)
    q = p0 * p0c
    apply_s1, apply_s2 = s_operators(w, p0, family, grid)

    def apply_s(vals):
        return apply_s1(vals) + apply_s2(vals)

    hv = np.abs(np.asarray(field_values(h, grid), dtype=float))
    hq = float(integrate(hv**q, grid)) ** (1.0 / q)
    if hq <= 0.0:
        raise ValueError("seed function vanishes")
    hv = hv / hq

    warning = None
    if Mhat is None or Mhat <= 0.0:
        est = float(integrate(apply_s(hv) ** q, grid)) ** (1.0 / q) / \
            float(integrate(hv**q, grid)) ** (1.0 / q)
        Mhat = 2.0 * est
        warning = f"Mhat defaulted to 2x single-seed estimate {est:.3g}"

    res = _iterate_series(hv, apply_s, K, Mhat, grid, label="s-majorant")
    rv = res.values
    wv = field_values(w, grid)
    wdv = wv ** (1.0 - p0c)
    w1 = rv**p0 * wdv ** (-1.0 / p0c)
    w2 = rv**p0c * wv ** (-1.0 / p0)
    recon = w1 * w2 ** (1.0 - p0)
    rel = float(np.max(np.abs(recon - wv) / wv))
    return FactorizationResult(
        w1=GridField(grid=grid, values=w1, label="factor-1"),
        w2=GridField(grid=grid, values=w2, label="factor-2"),
        majorant=res, identity_max_rel_err=rel, p0=p0, Mhat=Mhat,
        warning=warning)


# ---------------------------------------------------------------------------
# twin-ball search


def twin_ball(ball, c):
    """Companion ball of the same radius whose center sits at
    pseudo-distance about c * radius, rotated along the same modulus
    shell (n = 1)."""
    z = ball.center_array[0]
    rc = abs(z)
    if rc < 1e-12:
        raise ValueError("twin construction needs an off-center ball")
    target = min(c * ball.radius, 1.999)
    dtheta = 2.0 * np.arcsin(target / 2.0)
    z2 = z * np.exp(1j * dtheta)
    return PseudoBall((complex(z2),), ball.radius)


def twin_ball_statistic(ball, c, cache, samples=24, seed=0):
    """min over sampled points of the companion ball of |kernel integral
    of chi_ball| — the constancy floor of the twin-ball lower bound."""
    from .geometry import sample_points

    params = cache.params
    patch = cache.get(ball)
    mate = twin_ball(ball, c)
    rng = np.random.default_rng(seed)
    pts = []
    attempts = 0
    while len(pts) < samples and attempts < 200:
        cand = sample_points(512, rng, n=1)
        keep = mate.contains(cand)
        for zc in cand[keep][: samples - len(pts)]:
            pts.append(zc)
        attempts += 1
    if not pts:
        raise ValueError("could not sample the companion ball")
    zs = np.asarray(pts).reshape(-1, 1)
    power = params.n + params.alpha
    kern = (1.0 - zs @ np.conj(patch.points).T) ** (-power)
    vals = kern @ patch.measure_weights
    return float(np.min(np.abs(vals))), mate
