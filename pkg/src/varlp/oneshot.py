"""Ad-hoc single computations shared by the CLI and the HTTP service.

Each entry point takes an ExperimentConfig plus a small number of
selectors and returns a plain dict ready for JSON output: one Luxemburg
norm, one weight-class constant, or one operator norm estimate.
"""

from __future__ import annotations

import numpy as np

from .config import ConfigError
from .corpus import standard_corpus
from .harness import measurements as M
from .harness.context import RunContext
from .norms import luxemburg_norm, modular
from .quadrature import GridField
from .weights import b1_constant, doubling_ratio

CONSTANT_KINDS = ("bekolle", "muckenhoupt", "bplus", "bplusplus", "b1",
                  "doubling")
OPERATOR_NAMES = ("maximal", "maximal-full", "bergman", "regularize")


def _context(config):
    return RunContext(config=config, fixtures={})


def resolve_field(spec, grid, ctx):
    """Turn a field selector into a GridField on the given grid.

    Selectors: ``power:<beta>`` for |z|^beta, ``harmonic:<k>`` for
    Re(z1^k), ``bump`` for a boundary-anchored bump, ``corpus:<i>`` for
    the i-th standard-corpus field, ``one`` for the constant 1.
    """
    u = np.maximum(1.0 - np.sum(np.abs(grid.points) ** 2, axis=1), 0.0)
    if spec == "one":
        return GridField(grid, np.ones(grid.size), label="one")
    if spec == "bump":
        return GridField(grid, np.exp(-u * 8.0) * u, label="bump")
    if ":" in spec:
        head, _, arg = spec.partition(":")
        if head == "power":
            beta = float(arg)
            r = np.sqrt(np.sum(np.abs(grid.points) ** 2, axis=1))
            return GridField(grid, r ** beta, label=f"power:{beta:g}")
        if head == "harmonic":
            k = int(arg)
            return GridField(grid, np.real(grid.points[:, 0] ** k),
                             label=f"harmonic:{k}")
        if head == "corpus":
            fields = standard_corpus(grid, ctx.family(), p=ctx.exponent,
                                     weight=ctx.weight)
            i = int(arg)
            if not 0 <= i < len(fields):
                raise ConfigError(
                    f"corpus index {i} out of range 0..{len(fields) - 1}")
            return fields[i]
    raise ConfigError(f"unknown field selector: {spec!r}")


def compute_norm(config, field="power:0.5"):
    """Luxemburg norm of one field in the configured weighted space."""
    ctx = _context(config)
    grid = ctx.grid(config.refine)
    fld = resolve_field(field, grid, ctx)
    res = luxemburg_norm(fld, ctx.exponent, grid, weight=ctx.weight,
                         tol=config.norm_tol,
                         max_doublings=config.norm_max_doublings)
    return {
        "kind": "norm",
        "field": fld.label,
        "exponent": config.exponent,
        "weight": config.weight,
        "n": config.n,
        "alpha": config.alpha,
        "refined": bool(config.refine),
        "grid_size": int(grid.size),
        "value": float(res.value),
        "modular_at_value": float(res.modular_at_value),
        "iterations": int(res.iterations),
        "converged": bool(res.converged),
        "modular_of_field": float(modular(fld, ctx.exponent, grid,
                                          weight=ctx.weight)),
    }


def compute_constant(config, kind):
    """One weight-class constant for the configured weight/exponent."""
    if kind not in CONSTANT_KINDS:
        raise ConfigError(f"unknown constant kind: {kind!r}; "
                          f"choose from {', '.join(CONSTANT_KINDS)}")
    ctx = _context(config)
    w, p = ctx.weight, ctx.exponent
    base = {
        "kind": "constant",
        "constant": kind,
        "weight": config.weight,
        "exponent": config.exponent,
        "n": config.n,
        "alpha": config.alpha,
        "refined": bool(config.refine),
    }
    if kind == "doubling":
        value = doubling_ratio(w, ctx.family(config.refine), ctx.patch_cache)
        base.update({"value": float(value)})
        return base
    if kind == "b1":
        rep = b1_constant(w, ctx.family(config.refine),
                          ctx.grid(config.refine))
    else:
        rep = M.class_report(ctx, w, p, kind, refined=config.refine)
    base.update({"value": float(rep.estimate), "report": rep.to_dict()})
    return base


def compute_op(config, name, dump=None):
    """Norm estimate of one operator over the standard corpus.

    With dump set, the operator output on the worst-ratio field is also
    written to that path as CSV (node coordinates, value).
    """
    if name not in OPERATOR_NAMES:
        raise ConfigError(f"unknown operator: {name!r}; "
                          f"choose from {', '.join(OPERATOR_NAMES)}")
    from .operators import (maximal_boundary, maximal_full,
                            operator_norm_estimate, regularize)
    from .quadrature import export_field_csv

    ctx = _context(config)
    w, p = ctx.weight, ctx.exponent
    refined = config.refine
    grid = ctx.grid(refined)
    corpus = ctx.standard_corpus(refined, p=p, weight=w)
    if name == "maximal":
        fam = ctx.family(refined)
        apply_fn = lambda f: maximal_boundary(f, fam, grid)
    elif name == "maximal-full":
        fam = ctx.family(refined, class_b_only=False)
        apply_fn = lambda f: maximal_full(f, fam, grid)
    elif name == "bergman":
        applied = M.pplus_apply_map(ctx, corpus, refined)
        apply_fn = lambda f: applied[f.label]
    else:  # regularize
        apply_fn = lambda f: regularize(f, config.op_k, grid)
    est = operator_norm_estimate(apply_fn, p, grid, corpus, weight=w,
                                 norm_tol=config.norm_tol)
    out = {
        "kind": "op",
        "operator": name,
        "weight": config.weight,
        "exponent": config.exponent,
        "n": config.n,
        "alpha": config.alpha,
        "refined": bool(refined),
        "value": float(est.value),
        "argmax_field": est.argmax_label,
        "ratios": {k: float(v) for k, v in est.ratios.items()},
    }
    if name == "regularize":
        out["k"] = float(config.op_k)
    if dump:
        target = next((f for f in corpus
                       if getattr(f, "label", "") == est.argmax_label),
                      corpus[0])
        export_field_csv(apply_fn(target), dump)
        out["dump_path"] = dump
    return out


def export_grid(config, path):
    """Write the configured quadrature grid as CSV for audit."""
    from .quadrature import export_nodes_csv

    ctx = _context(config)
    grid = ctx.grid(config.refine)
    export_nodes_csv(grid, path)
    return {"kind": "grid", "n": config.n, "alpha": config.alpha,
            "refined": bool(config.refine), "nodes": int(grid.size),
            "path": path}
