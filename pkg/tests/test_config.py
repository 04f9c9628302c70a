import pytest

from varlp.config import (ConfigError, ExperimentConfig, config_from_mapping,
                          load_config, load_experiment_config, parse_value)


def test_parse_value_types():
    assert parse_value("true") is True
    assert parse_value("Off") is False
    assert parse_value("none") is None
    assert parse_value("42") == 42
    assert parse_value("2.5") == 2.5
    assert parse_value("const2") == "const2"


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("""
# comment line
suite = norms
alpha = 0.5          # trailing comment
refine = true
exponent = 2+sin|z|
""")
    mapping = load_config(path)
    assert mapping == {"suite": "norms", "alpha": 0.5, "refine": True,
                       "exponent": "2+sin|z|"}


def test_malformed_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("just a words line\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config_from_mapping({"speling": 1})


def test_type_coercion_errors():
    with pytest.raises(ConfigError):
        config_from_mapping({"seed": "soon"})
    with pytest.raises(ConfigError):
        config_from_mapping({"grid.radial": 2.5})
    with pytest.raises(ConfigError):
        config_from_mapping({"refine": "yes-please"})


def test_spec_key_aliases():
    cfg = config_from_mapping({
        "quad.scheme": "monte-carlo",
        "quad.radial": 20,
        "quad.angular": 32,
        "quad.grading": 2.0,
        "quad.seed": 9,
        "centers.radial_levels": 4,
        "centers.angular_count": 6,
        "radii.count": 5,
        "class_b_only": False,
        "op.K": 6,
        "op.Mhat": 2.5,
        "op.kernel_eta_factor": 8.0,
        "op.refine_depth": 2,
        "norm.max_doublings": 50,
    })
    assert cfg.grid_spec().scheme == "monte-carlo"
    assert cfg.grid_spec().seed == 9
    assert cfg.grid_radial == 20 and cfg.grid_grading == 2.0
    desc = cfg.family_descriptor()
    assert desc.radial_levels == 4 and desc.angular_count == 6
    assert desc.radii_count == 5 and desc.class_b_only is False
    oc = cfg.operator_config()
    assert oc.K == 6 and oc.Mhat == 2.5
    assert oc.kernel_eta_factor == 8.0 and oc.refine_depth == 2
    assert cfg.norm_max_doublings == 50


def test_exponent_family_folding():
    cfg = config_from_mapping({"exponent.family": "constant",
                               "exponent.params": 2.5})
    assert cfg.exponent == "const2.5"
    cfg = config_from_mapping({"exponent.family": "2+sin|z|"})
    assert cfg.exponent == "2+sin|z|"
    with pytest.raises(ConfigError):
        config_from_mapping({"exponent.params": 2.0})
    with pytest.raises(ConfigError):
        config_from_mapping({"exponent.family": "constant"})
    # an explicit name wins over the pair
    cfg = config_from_mapping({"exponent": "const3",
                               "exponent.family": "constant",
                               "exponent.params": 2.0})
    assert cfg.exponent == "const3"


def test_overrides_win(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("alpha = 0.5\nseed = 3\n")
    cfg = load_experiment_config(path, seed=11)
    assert cfg.alpha == 0.5
    assert cfg.seed == 11
    # None overrides are ignored
    cfg2 = load_experiment_config(path, seed=None)
    assert cfg2.seed == 3


def test_describe_round_trip():
    cfg = ExperimentConfig(alpha=0.5, weight="power+0.5")
    desc = cfg.describe()
    assert desc["alpha"] == 0.5
    rebuilt = config_from_mapping(desc)
    assert rebuilt == cfg


def test_with_overrides():
    cfg = ExperimentConfig()
    assert cfg.with_overrides(alpha=2.0).alpha == 2.0
    assert cfg.alpha == 1.0
