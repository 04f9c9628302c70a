"""Shared run state for verification suites.

RunContext resolves an ExperimentConfig into concrete objects (measure,
grid, ball families, patch cache, corpora, weight and exponent selections)
and caches them so the suites of one run share quadrature work.  Name
resolvers map config selector strings to corpus members.
"""

from __future__ import annotations

import re
import time

import numpy as np

from ..config import ConfigError, ExperimentConfig
from ..geometry import FamilyDescriptor, PseudoBall, enumerate_ball_family
from ..quadrature import GridSpec, MeasureParams, PatchCache, build_grid
from .. import corpus as corpus_mod
from .. import exponents as exponents_mod
from .. import weights as weights_mod

LN2 = float(np.log(2.0))
SLOPE_GEOMETRIC = LN2
SLOPE_BOUNDED = 0.1

CLASS_GEOMETRIC = "geometric-growth"
CLASS_BOUNDED = "bounded"
CLASS_INCONCLUSIVE = "inconclusive"


def resolve_weight(name):
    """Map a selector string to a Weight: const<c>, power<gamma>,
    angular<amp>, logpow<c>, or products joined with '*'."""
    name = name.strip()
    if "*" in name:
        parts = [resolve_weight(part) for part in name.split("*")]
        w = parts[0]
        for nxt in parts[1:]:
            w = weights_mod.product_weight(w, nxt)
        return w
    if name in ("one", "1"):
        return weights_mod.constant_weight(1.0)
    m = re.fullmatch(r"const([-+0-9.eE]+)", name)
    if m:
        return weights_mod.constant_weight(float(m.group(1)))
    m = re.fullmatch(r"power([-+0-9.eE]+)", name)
    if m:
        return weights_mod.power_weight(float(m.group(1)))
    m = re.fullmatch(r"angular([0-9.eE]+)", name)
    if m:
        return weights_mod.angular_weight(float(m.group(1)))
    m = re.fullmatch(r"logpow([-+0-9.eE]+)", name)
    if m:
        return weights_mod.log_power_weight(float(m.group(1)))
    raise ConfigError(f"unknown weight selector: {name!r}")


def resolve_exponent(name):
    """Map a selector string to an ExponentField."""
    name = name.strip()
    aliases = {
        "2+sin|z|": exponents_mod.radial_sin,
        "radial-sin": exponents_mod.radial_sin,
        "2+0.5cos(arg)": exponents_mod.angular_cos,
        "angular-cos": exponents_mod.angular_cos,
    }
    if name in aliases:
        return aliases[name]()
    m = re.fullmatch(r"const([0-9.eE]+)", name)
    if m:
        return exponents_mod.constant(float(m.group(1)))
    raise ConfigError(f"unknown exponent selector: {name!r}")


def dyadic_boundary_balls(j_lo=4, j_hi=10, angle=0.0):
    """Boundary-touching balls B(c_j, 2^{-j+1}) with |c_j| = 1 - 2^{-j}
    for j = j_lo..j_hi; the radius ladder of the blow-up classifier."""
    out = []
    for j in range(j_lo, j_hi + 1):
        r = 2.0 ** (-j)
        center = ((1.0 - r) * np.exp(1j * angle),)
        out.append(PseudoBall(center, 2.0 * r))
    return out


def classify_slope(values, j_lo=4):
    """Least-squares slope of log(value) against the dyadic index j and
    its classification.  Non-finite or non-positive values force the
    geometric-growth label (the quantity left the representable range)."""
    vals = np.asarray(values, dtype=float)
    js = np.arange(j_lo, j_lo + vals.size, dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0.0):
        return float("inf"), CLASS_GEOMETRIC
    y = np.log(vals)
    jc = js - js.mean()
    slope = float(np.sum(jc * (y - y.mean())) / np.sum(jc * jc))
    if slope >= SLOPE_GEOMETRIC:
        label = CLASS_GEOMETRIC
    elif slope <= SLOPE_BOUNDED:
        label = CLASS_BOUNDED
    else:
        label = CLASS_INCONCLUSIVE
    return slope, label


class StopWatch:
    def __init__(self):
        self.t0 = time.perf_counter()

    def lap_ms(self):
        now = time.perf_counter()
        ms = (now - self.t0) * 1000.0
        self.t0 = now
        return ms


class RunContext:
    """Resolved, cached run state shared by the checks of one run."""

    def __init__(self, config=None, fixtures=None):
        self.config = config or ExperimentConfig()
        self.fixtures = fixtures if fixtures is not None else {}
        self._cache = {}

    # -- lazily-built shared objects ------------------------------------

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def params(self):
        return self._get("params", self.config.measure_params)

    def grid_spec(self, refined=False):
        spec = self.config.grid_spec()
        return spec.refined() if refined else spec

    def grid(self, refined=False):
        key = ("grid", refined)
        return self._get(key, lambda: build_grid(self.params,
                                                 self.grid_spec(refined)))

    def family(self, refined=False, class_b_only=None):
        if class_b_only is None:
            class_b_only = self.config.family_class_b_only
        def build():
            desc = self.config.family_descriptor(class_b_only=class_b_only)
            if refined:
                desc = desc.refined()
            return enumerate_ball_family(desc)
        return self._get(("family", refined, class_b_only), build)

    @property
    def patch_cache(self):
        return self._get("patch_cache", lambda: PatchCache(self.params))

    @property
    def weight(self):
        return self._get("weight",
                         lambda: resolve_weight(self.config.weight))

    @property
    def exponent(self):
        return self._get("exponent",
                         lambda: resolve_exponent(self.config.exponent))

    def weight_corpus(self):
        return self._get("weight_corpus", weights_mod.weight_corpus)

    def exponent_corpus(self):
        return self._get("exponent_corpus", exponents_mod.exponent_corpus)

    def standard_corpus(self, refined=False, p=None, weight=None):
        key = ("standard_corpus", refined,
               getattr(p, "name", None), getattr(weight, "name", None))
        return self._get(key, lambda: corpus_mod.standard_corpus(
            self.grid(refined), self.family(refined), p=p, weight=weight))

    def dual_corpus(self, p, weight, refined=False):
        key = ("dual_corpus", refined, p.name, weight.name)
        return self._get(key, lambda: corpus_mod.dual_corpus(
            self.grid(refined), p, weight))

    def seed_fields(self, count=20, refined=False, seed=None):
        seed = self.config.seed if seed is None else seed
        key = ("seed_fields", count, refined, seed)
        return self._get(key, lambda: corpus_mod.seed_fields(
            self.grid(refined), count=count, seed=seed))

    # -- provenance -----------------------------------------------------

    def provenance(self, refined=False, corpus=None, extra=None):
        prov = {
            "grid": _spec_dict(self.grid_spec(refined)),
            "family": _desc_dict(self.config.family_descriptor()),
            "alpha": self.params.alpha,
            "n": self.params.n,
            "seed": self.config.seed,
        }
        if refined:
            prov["refined"] = True
        if corpus is not None:
            prov["corpus_ids"] = [getattr(f, "label", str(f)) for f in corpus]
        if extra:
            prov.update(extra)
        return prov

    def fixture(self, *keys, default=None):
        node = self.fixtures
        for k in keys:
            if not isinstance(node, dict) or k not in node:
                return default
            node = node[k]
        return node


def _spec_dict(spec):
    return {"scheme": spec.scheme, "radial": spec.radial,
            "subdiv": spec.subdiv, "angular": spec.angular,
            "grading": spec.grading, "order": spec.order}


def _desc_dict(desc):
    return {"radial_levels": desc.radial_levels,
            "angular_count": desc.angular_count,
            "radii_count": desc.radii_count,
            "class_b_only": desc.class_b_only}
