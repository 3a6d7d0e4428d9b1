"""Configuration files, presets and run directories.

A configuration file is YAML with ``schema_version: 1`` and one mapping per
section::

    schema_version: 1
    preset: desk
    seed: 3
    dataset:
      n_train: 500
    translator:
      epochs: 20
    task:
      trajectory:
        name: square

Values are resolved in the order preset defaults, file, ``--set`` overrides
and command line flags, later sources take precedence.
"""
import copy
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .dataset import PRESETS as COLLECTION_PRESETS, CollectionConfig
from .errors import ConfigurationError
from .estimate import EstimatorConfig
from .io import save_json
from .servo import TaskConfig
from .translate import TranslatorConfig


logger = logging.getLogger(__name__)


SCHEMA_VERSION = 1
SECTIONS = ("dataset", "translator", "estimator", "task")
OUTPUT_ROOT_VARIABLE = "SHEARTAC_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"

PRESETS = {
    name: {
        "dataset": {"n_train": values["n_train"], "n_val": values["n_val"],
                    "geometry": {"image_size": values["image_size"]}},
        "translator": {"epochs": 100},
        "estimator": {"epochs": 50},
    }
    for name, values in COLLECTION_PRESETS.items()
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of all pipeline stages.

    Parameters
    ----------
    dataset : CollectionConfig
        Data collection.

    translator : TranslatorConfig
        Translator architecture and training. The variant is chosen per run.

    estimator : EstimatorConfig
        Estimator architecture and training.

    task : TaskConfig
        Servo task.

    preset : str, optional (default: 'desk')
        Preset the configuration started from.

    output_dir : str, optional (default: None)
        Fixed run directory instead of a fresh one below the output root.
    """
    dataset: CollectionConfig = field(default_factory=CollectionConfig)
    translator: TranslatorConfig = field(default_factory=TranslatorConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    preset: str = "desk"
    output_dir: str = None

    def __post_init__(self):
        image_size = self.dataset.geometry.image_size
        for name in ("translator", "estimator"):
            if getattr(self, name).image_size != image_size:
                raise ConfigurationError(
                    "%s.image_size is %d but the dataset renders %d px "
                    "images" % (name, getattr(self, name).image_size,
                                image_size))

    def translator_for(self, variant):
        """Translator configuration of another variant."""
        values = self.translator.to_dict()
        values.update(variant=variant, shear_input_dim=None)
        return TranslatorConfig.from_dict(values)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "preset": self.preset,
            "output_dir": self.output_dir,
            "dataset": self.dataset.to_dict(),
            "translator": self.translator.to_dict(),
            "estimator": self.estimator.to_dict(),
            "task": self.task.to_dict(),
        }

    @classmethod
    def from_dict(cls, config):
        """Build from a mapping with the sections of a configuration file."""
        return cls(
            dataset=CollectionConfig.from_dict(config.get("dataset", {})),
            translator=TranslatorConfig.from_dict(
                config.get("translator", {})),
            estimator=EstimatorConfig.from_dict(config.get("estimator", {})),
            task=TaskConfig.from_dict(config.get("task", {})),
            preset=config.get("preset", "desk"),
            output_dir=config.get("output_dir"))


def merge(base, update):
    """Recursively merge mappings, values of update take precedence.

    Parameters
    ----------
    base : dict
        Defaults, not modified.

    update : dict
        Values that replace defaults.

    Returns
    -------
    merged : dict
        New mapping.
    """
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(filename):
    """Read and check a YAML configuration file.

    Parameters
    ----------
    filename : str or Path
        Configuration file.

    Returns
    -------
    content : dict
        Sections of the file.

    Raises
    ------
    ConfigurationError
        If the file cannot be parsed, has another schema version or
        contains unknown sections.
    """
    try:
        with open(filename, "r") as f:
            content = yaml.safe_load(f)
    except OSError as e:
        raise ConfigurationError("Could not read '%s': %s" % (filename, e))
    except yaml.YAMLError as e:
        raise ConfigurationError("'%s' is not valid YAML: %s" % (filename, e))
    if content is None:
        content = {}
    if not isinstance(content, dict):
        raise ConfigurationError("'%s' must contain a mapping" % filename)
    version = content.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(
            "'%s' has schema_version %r, expected %d"
            % (filename, version, SCHEMA_VERSION))
    _check_keys(content)
    return content


def _check_keys(content):
    allowed = set(SECTIONS) | {"preset", "seed", "output_dir"}
    unknown = sorted(set(content) - allowed)
    if unknown:
        raise ConfigurationError(
            "Unknown configuration keys %s, expected %s"
            % (unknown, sorted(allowed)))
    for section in SECTIONS:
        if not isinstance(content.get(section, {}), dict):
            raise ConfigurationError("Section '%s' must be a mapping"
                                     % section)


_OVERRIDE = re.compile(r"^([A-Za-z_][\w.]*)=(.*)$")


def parse_override(text):
    """Parse an override of the form ``section.key=value``.

    Parameters
    ----------
    text : str
        Override, the value is parsed as YAML.

    Returns
    -------
    override : dict
        Nested mapping.
    """
    match = _OVERRIDE.match(text)
    if match is None:
        raise ConfigurationError(
            "Override '%s' is not of the form section.key=value" % text)
    path, value = match.groups()
    try:
        value = yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise ConfigurationError("Cannot parse value of '%s': %s" % (text, e))
    override = value
    for key in reversed(path.split(".")):
        override = {key: override}
    return override


def load_config(filename=None, preset=None, overrides=(), flags=None):
    """Resolve the configuration of a run.

    Parameters
    ----------
    filename : str or Path, optional (default: None)
        YAML configuration file.

    preset : str, optional (default: 'desk' or the preset of the file)
        Named preset the configuration starts from.

    overrides : list of str, optional (default: ())
        Overrides of the form ``section.key=value``.

    flags : dict, optional (default: None)
        Values from command line flags with the same structure as a file.

    Returns
    -------
    config : RunConfig
        Resolved configuration.

    Raises
    ------
    ConfigurationError
        If any source is invalid.
    """
    content = read_config_file(filename) if filename is not None else {}
    for override in overrides:
        content = merge(content, parse_override(override))
    if flags:
        content = merge(content, flags)
    _check_keys(content)

    if preset is None:
        preset = content.get("preset", "desk")
    if preset not in PRESETS:
        raise ConfigurationError("Unknown preset '%s', expected one of %s"
                                 % (preset, sorted(PRESETS)))
    resolved = merge(PRESETS[preset], content)
    resolved["preset"] = preset

    image_size = resolved["dataset"]["geometry"]["image_size"]
    for section in ("translator", "estimator"):
        resolved.setdefault(section, {}).setdefault("image_size", image_size)
    task = resolved.setdefault("task", {})
    for key in ("geometry", "markers", "membrane"):
        if key in resolved["dataset"]:
            task.setdefault(key, resolved["dataset"][key])
    seed = resolved.pop("seed", None)
    if seed is not None:
        for section in SECTIONS:
            resolved[section]["seed"] = seed

    config = RunConfig.from_dict(resolved)
    logger.debug("Resolved configuration: %s", config.to_dict())
    return config


def output_root():
    """Root directory of run directories."""
    return Path(os.environ.get(OUTPUT_ROOT_VARIABLE, DEFAULT_OUTPUT_ROOT))


def new_run_dir(command, output=None):
    """Create a fresh run directory.

    Parameters
    ----------
    command : str
        Name of the command.

    output : str or Path, optional (default: None)
        Explicit directory, must not exist yet.

    Returns
    -------
    run_dir : Path
        Created directory, ``<root>/<command>/run-NNN`` by default.
    """
    if output is not None:
        run_dir = Path(output)
        if run_dir.exists():
            raise ConfigurationError(
                "Output directory '%s' already exists" % run_dir)
        run_dir.mkdir(parents=True)
        return run_dir

    parent = output_root() / command
    parent.mkdir(parents=True, exist_ok=True)
    numbers = [int(p.name[4:]) for p in parent.glob("run-*")
               if p.name[4:].isdigit()]
    number = max(numbers, default=0) + 1
    while True:
        run_dir = parent / ("run-%03d" % number)
        try:
            run_dir.mkdir()
            return run_dir
        except FileExistsError:
            number += 1


def write_run_manifest(run_dir, command, config, arguments=None):
    """Record the resolved configuration of a run in ``run.json``.

    Parameters
    ----------
    run_dir : Path
        Run directory.

    command : str
        Name of the command.

    config : dict
        Resolved configuration.

    arguments : dict, optional (default: None)
        Command line arguments.
    """
    save_json({"command": command, "version": __version__,
               "config": config, "arguments": arguments or {}},
              Path(run_dir) / "run.json")
