import json

import pytest
from sheartac import __version__
from sheartac.config import (
    RunConfig, load_config, merge, parse_override, read_config_file,
    new_run_dir, write_run_manifest)
from sheartac.errors import ConfigurationError


def _write(path, text):
    path.write_text(text)
    return path


def _normalized(content):
    return json.loads(json.dumps(content))


def test_desk_preset_is_default():
    config = load_config()
    assert config.preset == "desk"
    assert (config.dataset.n_train, config.dataset.n_val) == (2000, 500)
    assert config.dataset.geometry.image_size == 64
    assert config.translator.image_size == 64
    assert config.estimator.image_size == 64
    assert config.task.geometry.image_size == 64
    assert config.translator.epochs == 100
    assert config.estimator.epochs == 50


def test_paper_preset():
    config = load_config(preset="paper")
    assert (config.dataset.n_train, config.dataset.n_val) == (5000, 2000)
    assert config.dataset.geometry.image_size == 128
    assert config.translator.image_size == 128
    assert config.estimator.image_size == 128
    with pytest.raises(ConfigurationError):
        load_config(preset="lab")


def test_config_file(tmp_path):
    filename = _write(tmp_path / "run.yaml", """
schema_version: 1
preset: paper
seed: 3
dataset:
  n_train: 10
translator:
  epochs: 2
task:
  task: colift
  gravity_shear_bias: 0.5
  trajectory:
    name: star
""")
    config = load_config(filename)
    assert config.preset == "paper"
    assert config.dataset.n_train == 10
    assert config.dataset.n_val == 2000
    assert config.translator.epochs == 2
    assert config.task.task == "colift"
    assert config.task.trajectory.name == "star"
    assert config.task.gravity_shear_bias == 0.5
    for section in (config.dataset, config.translator, config.estimator,
                    config.task):
        assert section.seed == 3


def test_precedence(tmp_path):
    filename = _write(tmp_path / "run.yaml",
                      "schema_version: 1\ndataset:\n  n_train: 10\n")
    assert load_config(filename).dataset.n_train == 10
    overridden = load_config(filename, overrides=["dataset.n_train=20"])
    assert overridden.dataset.n_train == 20
    flagged = load_config(filename, overrides=["dataset.n_train=20"],
                          flags={"dataset": {"n_train": 30}})
    assert flagged.dataset.n_train == 30
    assert load_config(filename, preset="paper").dataset.n_train == 10


def test_invalid_files(tmp_path):
    with pytest.raises(ConfigurationError):
        read_config_file(tmp_path / "missing.yaml")
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "a.yaml", "dataset: [1, 2"))
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "b.yaml", "dataset: {}\n"))
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "c.yaml", "schema_version: 2\n"))
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "d.yaml",
                                "schema_version: 1\nrobot: {}\n"))
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "e.yaml",
                                "schema_version: 1\ndataset: 3\n"))
    unknown_field = _write(tmp_path / "f.yaml",
                           "schema_version: 1\ndataset:\n  colour: red\n")
    with pytest.raises(ConfigurationError):
        load_config(unknown_field)


def test_empty_file_requires_schema_version(tmp_path):
    with pytest.raises(ConfigurationError):
        read_config_file(_write(tmp_path / "empty.yaml", ""))
    assert read_config_file(_write(tmp_path / "minimal.yaml",
                                   "schema_version: 1\n")) == {}


def test_parse_override():
    assert parse_override("task.trajectory.name=square") == {
        "task": {"trajectory": {"name": "square"}}}
    assert parse_override("dataset.n_train=20") == {
        "dataset": {"n_train": 20}}
    assert parse_override("seed=4") == {"seed": 4}
    assert parse_override("estimator.conv_channels=[8, 16]") == {
        "estimator": {"conv_channels": [8, 16]}}
    with pytest.raises(ConfigurationError):
        parse_override("dataset.n_train")
    with pytest.raises(ConfigurationError):
        parse_override("=3")


def test_merge_does_not_modify_inputs():
    base = {"a": {"b": 1, "c": 2}}
    update = {"a": {"b": 3}, "d": 4}
    assert merge(base, update) == {"a": {"b": 3, "c": 2}, "d": 4}
    assert base == {"a": {"b": 1, "c": 2}}


def test_image_sizes_must_match():
    with pytest.raises(ConfigurationError):
        load_config(overrides=["translator.image_size=32"])
    config = load_config(overrides=["dataset.geometry.image_size=32"])
    assert config.translator.image_size == 32
    assert config.task.geometry.image_size == 32


def test_translator_for_other_variant():
    config = load_config()
    assert config.translator.variant == "shpix2pix"
    assert config.translator.shear_input_dim == 4
    pix2pix = config.translator_for("pix2pix")
    assert pix2pix.variant == "pix2pix"
    assert pix2pix.shear_input_dim == 0
    assert pix2pix.epochs == config.translator.epochs


def test_run_config_dict_representation():
    config = load_config(overrides=["dataset.n_train=12"])
    content = config.to_dict()
    assert content["schema_version"] == 1
    assert _normalized(RunConfig.from_dict(content).to_dict()) == \
        _normalized(content)


def test_new_run_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SHEARTAC_OUTPUT_ROOT", str(tmp_path / "runs"))
    first = new_run_dir("collect")
    second = new_run_dir("collect")
    assert first == tmp_path / "runs" / "collect" / "run-001"
    assert second.name == "run-002"
    assert first.is_dir() and second.is_dir()

    explicit = new_run_dir("collect", tmp_path / "mine")
    assert explicit.is_dir()
    with pytest.raises(ConfigurationError):
        new_run_dir("collect", tmp_path / "mine")


def test_write_run_manifest(tmp_path):
    config = load_config()
    write_run_manifest(tmp_path, "collect", config.to_dict(), {"seed": 1})
    with open(tmp_path / "run.json", "r") as f:
        content = json.load(f)
    assert content["command"] == "collect"
    assert content["version"] == __version__
    assert content["arguments"] == {"seed": 1}
    assert _normalized(RunConfig.from_dict(content["config"]).to_dict()) \
        == content["config"]
