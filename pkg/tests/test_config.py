"""Tests for config loading and flag merging."""

import json

import pytest
from pydantic import ValidationError

from rdlab.config.loader import RUN_CONFIG_NAME, load_config_file, merge, resolve_config, write_run_config
from rdlab.config.schemas import GenConfig, RangePreset, SolveConfig, SolveMethod, SweepConfig, SweepKind, TrainConfig
from rdlab.data.models import ParameterRanges
from rdlab.errors import MalformedFileError


def test_key_value_file_with_sections(tmp_path):
    """`[section]` prefixes keys; values are parsed as YAML scalars."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "# training run\n"
        "data = data/dataset.csv\n"
        "[network]\n"
        "epochs = 50\n"
        "lambda = 0.001   # L2\n"
        "layer_sizes = [6, 16, 1]\n"
    )
    data = load_config_file(path)
    assert data == {
        "data": "data/dataset.csv",
        "network": {"epochs": 50, "lambda": 0.001, "layer_sizes": [6, 16, 1]},
    }
    config = TrainConfig.model_validate(data)
    assert config.network.l2 == 0.001
    assert config.network.epochs == 50


def test_yaml_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("kind: k\nmodel: oracle\nlattice:\n  nx: 5\n  nt: 3\n")
    config = resolve_config(SweepConfig, path, {})
    assert config.kind == SweepKind.K
    assert config.lattice.nx == 5


def test_dotted_keys_nest_over_baseline_spec(tmp_path):
    """Dotted keys nest; spec fields not given keep their baseline values."""
    path = tmp_path / "run.cfg"
    path.write_text("spec.c0 = 80.0\nmethod = fd\n")
    config = resolve_config(SolveConfig, path, {})
    assert config.method == SolveMethod.FD
    assert config.spec.k == 2.125e-7
    assert config.spec.de == 2.6e-9
    assert config.spec.c0 == 80.0


def test_flags_override_file(tmp_path):
    """Given flags win over file values; unset (None) flags do not."""
    path = tmp_path / "run.yaml"
    path.write_text("out: from_file\njobs: 3\ngeneration:\n  seed: 9\n  n_batches: 40\n")
    config = resolve_config(GenConfig, path, {"jobs": None, "generation.seed": 11})
    assert config.jobs == 3
    assert config.generation.seed == 11
    assert config.generation.n_batches == 40
    assert str(config.out) == "from_file"


def test_merge_is_recursive():
    base = {"a": {"b": 1, "c": 2}, "d": 3}
    assert merge(base, {"a": {"c": 5}}) == {"a": {"b": 1, "c": 5}, "d": 3}
    assert base["a"]["c"] == 2


def test_malformed_line_reports_number(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("epochs = 5\nnot a setting\n")
    with pytest.raises(MalformedFileError) as info:
        load_config_file(path)
    assert info.value.line == 2


def test_missing_config_file(tmp_path):
    with pytest.raises(MalformedFileError):
        load_config_file(tmp_path / "absent.yaml")


def test_empty_file_is_empty_config(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("\n# nothing\n")
    assert load_config_file(path) == {}


def test_invalid_values_raise_validation_error(tmp_path):
    with pytest.raises(ValidationError):
        resolve_config(GenConfig, None, {"jobs": 0})
    with pytest.raises(ValidationError):
        resolve_config(SweepConfig, None, {"kind": "k"})


def test_desk_preset_applies_ranges():
    config = resolve_config(GenConfig, None, {"preset": "desk"})
    assert config.preset == RangePreset.DESK
    assert config.generation.ranges == ParameterRanges.desk_scale()
    batch = resolve_config(SweepConfig, None, {"kind": "batch"})
    assert batch.generation.ranges == ParameterRanges.desk_scale()


def test_damkohler_preset_applies_ranges():
    """The reaction-dominated preset reaches gen, batch sweeps and similarity."""
    config = resolve_config(GenConfig, None, {"preset": "damkohler"})
    assert config.generation.ranges == ParameterRanges.damkohler_scale()
    batch = resolve_config(SweepConfig, None, {"kind": "batch", "preset": "damkohler"})
    assert batch.generation.ranges == ParameterRanges.damkohler_scale()
    sweep = resolve_config(SweepConfig, None, {"kind": "damkohler", "model": "oracle", "similarity": "damkohler"})
    assert sweep.similarity.ranges() == ParameterRanges.damkohler_scale()


def test_write_run_config(tmp_path):
    """The resolved config is stored with aliases and extra fields."""
    config = TrainConfig.model_validate({"data": "d.csv", "network": {"lambda": 5e-4}})
    path = write_run_config(config, tmp_path / "run", {"command": "train"})
    assert path.name == RUN_CONFIG_NAME
    document = json.loads(path.read_text())
    assert document["command"] == "train"
    assert document["config"]["network"]["lambda"] == 5e-4
