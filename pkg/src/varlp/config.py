"""Flat key=value run configuration.

A config file is plain text: one ``key = value`` per line, ``#`` comments,
blank lines ignored.  Values are parsed as bool/int/float when they look
like one, else kept as strings.  ``ExperimentConfig`` holds the resolved
run parameters; unknown keys are rejected so that typos fail fast.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace

from .geometry import FamilyDescriptor
from .quadrature import GridSpec, MeasureParams


class ConfigError(ValueError):
    """Malformed config file or unknown/invalid keys (process exit 2)."""


def parse_value(raw):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config(path):
    """Parse a flat key=value file into a dict."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = body.split("=", 1)
            out[key.strip()] = parse_value(raw)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a verification run.

    Two runs with equal configs produce identical statistics; the seed
    fixes every random draw and reduction order is deterministic.
    """

    suite: str = ""
    n: int = 1
    alpha: float = 1.0
    seed: int = 0
    refine: bool = False
    out_dir: str = "reports"
    # grid selectors
    grid_scheme: str = "polar-tensor"
    grid_radial: int = 28
    grid_angular: int = 48
    grid_order: int = 6
    grid_grading: float = 1.5
    grid_seed: int = 0
    # family selectors
    family_radial_levels: int = 6
    family_angular: int = 12
    family_radii: int = 8
    family_class_b_only: bool = True
    # content selectors (names resolved by the harness registries)
    exponent: str = "const2"
    weight: str = "const1"
    corpus: str = "standard"
    # operator parameters
    op_k: float = 0.25
    op_depth: int = 8
    op_mhat: float = None
    op_eta: float = 10.0
    op_refine_depth: int = 3
    # tolerances
    norm_tol: float = 1e-9
    norm_max_doublings: int = 200
    rel_tol: float = 1e-8
    slack: float = 1e-6
    fixtures_path: str = None

    def describe(self):
        d = asdict(self)
        return d

    def grid_spec(self):
        return GridSpec(scheme=self.grid_scheme, radial=self.grid_radial,
                        angular=self.grid_angular, order=self.grid_order,
                        grading=self.grid_grading, seed=self.grid_seed)

    def measure_params(self):
        return MeasureParams(n=self.n, alpha=self.alpha)

    def family_descriptor(self, class_b_only=None):
        if class_b_only is None:
            class_b_only = self.family_class_b_only
        return FamilyDescriptor(radial_levels=self.family_radial_levels,
                                angular_count=self.family_angular,
                                radii_count=self.family_radii,
                                class_b_only=class_b_only)

    def operator_config(self):
        from .operators import OperatorConfig
        return OperatorConfig(k=self.op_k, K=self.op_depth,
                              Mhat=self.op_mhat,
                              kernel_eta_factor=self.op_eta,
                              refine_depth=self.op_refine_depth)

    def with_overrides(self, **kw):
        return replace(self, **kw)


_KEY_TO_FIELD = {
    "suite": "suite",
    "n": "n",
    "alpha": "alpha",
    "seed": "seed",
    "refine": "refine",
    "out": "out_dir",
    "quad.scheme": "grid_scheme",
    "quad.radial": "grid_radial",
    "quad.angular": "grid_angular",
    "quad.grading": "grid_grading",
    "quad.seed": "grid_seed",
    "grid.scheme": "grid_scheme",
    "grid.radial": "grid_radial",
    "grid.angular": "grid_angular",
    "grid.order": "grid_order",
    "grid.grading": "grid_grading",
    "grid.seed": "grid_seed",
    "centers.radial_levels": "family_radial_levels",
    "centers.angular_count": "family_angular",
    "radii.count": "family_radii",
    "class_b_only": "family_class_b_only",
    "family.radial_levels": "family_radial_levels",
    "family.angular": "family_angular",
    "family.radii": "family_radii",
    "exponent": "exponent",
    "weight": "weight",
    "corpus": "corpus",
    "op.k": "op_k",
    "op.K": "op_depth",
    "op.depth": "op_depth",
    "op.Mhat": "op_mhat",
    "op.mhat": "op_mhat",
    "op.kernel_eta_factor": "op_eta",
    "op.refine_depth": "op_refine_depth",
    "norm.tol": "norm_tol",
    "norm.max_doublings": "norm_max_doublings",
    "rel.tol": "rel_tol",
    "slack": "slack",
    "fixtures": "fixtures_path",
}

_INT_FIELDS = {"n", "seed", "grid_radial", "grid_angular", "grid_order",
               "grid_seed", "family_radial_levels", "family_angular",
               "family_radii", "op_depth", "op_refine_depth",
               "norm_max_doublings"}
_FLOAT_FIELDS = {"alpha", "grid_grading", "op_k", "op_mhat", "op_eta",
                 "norm_tol", "rel_tol", "slack"}
_BOOL_FIELDS = {"refine", "family_class_b_only"}


def config_from_mapping(mapping, **overrides):
    """Build an ExperimentConfig from a flat mapping (file keys or field
    names), applying keyword overrides last."""
    mapping = _fold_exponent_keys(dict(mapping))
    kwargs = {}
    for key, value in mapping.items():
        name = _KEY_TO_FIELD.get(key, key if key in ExperimentConfig.__dataclass_fields__ else None)
        if name is None or name.startswith("_"):
            raise ConfigError(f"unknown config key: {key}")
        kwargs[name] = _coerce(name, value, key)
    kwargs.update({k: _coerce(k, v, k) for k, v in overrides.items()
                   if v is not None})
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _fold_exponent_keys(mapping):
    """Collapse the two-key exponent selector (exponent.family +
    exponent.params) into a registry name; an explicit `exponent` key
    wins."""
    family = mapping.pop("exponent.family", None)
    params = mapping.pop("exponent.params", None)
    if family is None:
        if params is not None:
            raise ConfigError("exponent.params given without "
                              "exponent.family")
        return mapping
    if "exponent" in mapping:
        return mapping
    if str(family) == "constant":
        if params is None:
            raise ConfigError("exponent.family=constant needs "
                              "exponent.params")
        mapping["exponent"] = f"const{float(params):g}"
    else:
        mapping["exponent"] = str(family)
    return mapping


def _coerce(name, value, key):
    if value is None:
        return None
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected integer, got {value!r}")
        if float(value) != int(value):
            raise ConfigError(f"{key}: expected integer, got {value!r}")
        return int(value)
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected number, got {value!r}")
        return float(value)
    if name in _BOOL_FIELDS:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    return str(value)


def load_experiment_config(path, **overrides):
    return config_from_mapping(load_config(path), **overrides)
