"""Deterministic labeled test-field corpora.

Every builder returns a list of ``GridField`` objects with stable labels so
that reports can name the field that realised a supremum.  Construction is
deterministic for a given grid, family and seed.
"""

from __future__ import annotations

import numpy as np

from .quadrature import GridField, field_values

STANDARD_MIN_SIZE = 20
DUAL_CORPUS_SIZE = 32

_BUMP_ANCHORS = [0.0 + 0.0j, 0.5 + 0.0j, 0.0 + 0.5j, -0.55 + 0.0j,
                 0.0 - 0.55j, 0.72 + 0.0j, -0.5 + 0.5j, 0.3 - 0.8j]
_BUMP_SCALES = [0.2, 0.35]


def _z(grid):
    return grid.points[:, 0]


def _abs2(grid):
    return grid.radii**2


def indicator_fields(grid, family, count=6):
    """Characteristic functions of family balls spread across the radius
    ladder (largest to smallest resolvable)."""
    balls = [b for b in family.balls if np.any(grid.mask(b))]
    if not balls:
        return []
    order = np.argsort([-b.radius for b in balls])
    pick = np.unique(np.linspace(0, len(balls) - 1, count).astype(int))
    out = []
    for j, i in enumerate(pick):
        b = balls[order[i]]
        vals = np.where(grid.mask(b), 1.0, 0.0)
        out.append(GridField(grid, vals, label=f"indicator{j}_r{b.radius:.3g}"))
    return out


def power_profile_fields(grid, betas=(-0.25, 0.0, 0.5, 1.0)):
    """(1 - |z|^2)^beta profiles; beta > -1 keeps them integrable."""
    s = 1.0 - _abs2(grid)
    return [GridField(grid, s**b, label=f"power{b:g}") for b in betas]


def harmonic_fields(grid, orders=(1, 2, 3)):
    """|Re z^m| for low orders (nonnegative, oscillatory in angle)."""
    z = _z(grid)
    return [GridField(grid, np.abs(np.real(z**m)), label=f"harmonic{m}")
            for m in orders]


def bump_fields(grid, anchors=None, scales=None):
    """Gaussian bumps at fixed anchors and widths."""
    anchors = _BUMP_ANCHORS[:4] if anchors is None else anchors
    scales = _BUMP_SCALES if scales is None else scales
    z = _z(grid)
    out = []
    for a in anchors:
        for s in scales:
            vals = np.exp(-np.abs(z - a) ** 2 / s**2)
            out.append(GridField(grid, vals,
                                 label=f"bump{a.real:+.2f}{a.imag:+.2f}_s{s:g}"))
    return out


def weight_profile_fields(grid, w, p, family, count=4):
    """w'(z)^{1/p'(z)} cut to boundary balls; these are the natural
    extremisers for weighted averaging bounds."""
    from .weights import dual_weight

    wd = np.asarray(field_values(dual_weight(w, p), grid), dtype=float)
    pcv = np.asarray(p.conjugate()(grid.points), dtype=float)
    base = np.minimum(wd ** (1.0 / pcv), 1e140)
    balls = [b for b in family.balls
             if b.touches_boundary() and np.any(grid.mask(b))]
    order = np.argsort([-b.radius for b in balls])
    pick = np.unique(np.linspace(0, len(balls) - 1, count).astype(int))
    out = []
    for j, i in enumerate(pick):
        b = balls[order[i]]
        vals = np.where(grid.mask(b), base, 0.0)
        out.append(GridField(grid, vals, label=f"dualprofile{j}_r{b.radius:.3g}"))
    return out


def standard_corpus(grid, family, p=None, weight=None):
    """The default >= 20 field corpus for operator-norm estimation:
    constants, ball indicators, radial power profiles, angular harmonics,
    Gaussian bumps, and (when an exponent/weight pair is given) dual-weight
    profiles."""
    fields = [GridField(grid, np.ones(grid.size), label="constant1")]
    fields += indicator_fields(grid, family)
    fields += power_profile_fields(grid)
    fields += harmonic_fields(grid)
    fields += bump_fields(grid)
    if p is not None and weight is not None:
        fields += weight_profile_fields(grid, weight, p, family)
    if len(fields) < STANDARD_MIN_SIZE:
        raise RuntimeError("standard corpus came up short; grid cannot "
                           "resolve enough family balls")
    return fields


def dual_corpus(grid, p, weight, size=DUAL_CORPUS_SIZE):
    """Dual test fields: powers of the dual weight w' modulated by smooth
    bumps.  Used to probe the duality-subordinate norm from below."""
    from .weights import dual_weight

    wd = np.asarray(field_values(dual_weight(weight, p), grid), dtype=float)
    pcv = np.asarray(p.conjugate()(grid.points), dtype=float)
    z = _z(grid)
    powers = [0.0, 1.0 / 3.0, 0.5, 1.0]
    out = []
    for c in powers:
        with np.errstate(over="ignore"):
            base = np.minimum(wd ** (c / pcv), 1e140)
        for a in _BUMP_ANCHORS:
            s = 0.35
            vals = base * np.exp(-np.abs(z - a) ** 2 / s**2)
            out.append(GridField(grid, vals,
                                 label=f"dual_w{c:g}_b{a.real:+.2f}{a.imag:+.2f}"))
            if len(out) == size:
                return out
    while len(out) < size:  # only reached for enlarged size requests
        k = len(out)
        vals = wd ** (((k % 7) / 7.0) / pcv) * np.exp(-grid.radii**2 / 0.5)
        out.append(GridField(grid, vals, label=f"dual_extra{k}"))
    return out


def seed_fields(grid, count=20, seed=0):
    """Strictly positive bounded seeds for the majorant iterations: small
    constant floor plus |low-order random trigonometric polynomial|."""
    rng = np.random.default_rng(seed)
    z = _z(grid)
    s = 1.0 - _abs2(grid)
    out = []
    for j in range(count):
        acc = np.zeros(grid.size)
        for m in range(1, 4):
            a, b = rng.normal(size=2)
            acc = acc + a * np.real(z**m) + b * np.imag(z**m)
        c = rng.uniform(0.0, 1.0)
        vals = 0.1 + np.abs(acc) + c * np.sqrt(s)
        out.append(GridField(grid, vals, label=f"seed{j}"))
    return out
