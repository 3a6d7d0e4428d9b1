"""Collection, storage and loading of paired tactile datasets.

A dataset consists of tuples of a simulated tactile image, a synthetic real
tactile image, the shear vector that separates them and the ground truth
label of the contact. Images are stored as PNG files next to a JSON
manifest that also duplicates all numeric fields of every sample.
"""
import functools
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from tqdm import tqdm

from .contact import (
    SensorGeometry, ContactRanges, ContactLabel, LABEL_NAMES, render_depth,
    sample_contact)
from .errors import ConfigurationError, ContactSamplingError, DatasetError
from .io import save_json, load_json
from .pose import Pose4, ShearVector, MOUNTS, shear_to_sensor_frame
from .sensor import (
    TactileImage, MarkerGridConfig, MembraneParams, sim_tactile_image,
    real_tactile_oracle, save_png, load_png)
from .shapes import (
    CONTACT_TYPES, ObjectShape, HalfSpace, Box, shape_from_dict)


logger = logging.getLogger(__name__)


SCHEMA_VERSION = 1
SPLITS = ("train", "val")
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class CollectionObject:
    """Object that is touched during collection.

    Parameters
    ----------
    object_id : str
        Name of the object in the manifest.

    shape : ObjectShape
        Geometry in the world frame.

    contact_type : str
        Either 'surface' or 'edge'.
    """
    object_id: str
    shape: ObjectShape
    contact_type: str

    def __post_init__(self):
        if self.contact_type not in CONTACT_TYPES:
            raise ConfigurationError(
                "Unknown contact type '%s' of object '%s'"
                % (self.contact_type, self.object_id))

    def to_dict(self):
        return {"object_id": self.object_id,
                "contact_type": self.contact_type,
                "shape": self.shape.to_dict()}

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(config["object_id"], shape_from_dict(config["shape"]),
                       config["contact_type"])
        except KeyError as e:
            raise ConfigurationError("Object is missing the field %s" % e)


def default_objects():
    """Flat surface and the top face and edge of a 40 mm prism.

    Returns
    -------
    objects : tuple
        Collection objects.
    """
    prism = Box(Pose4(z=-20.0), size=(40.0, 40.0, 40.0))
    return (
        CollectionObject("flat", HalfSpace(), "surface"),
        CollectionObject("prism_face", prism, "surface"),
        CollectionObject("prism_edge", prism, "edge"),
    )


PRESETS = {
    "desk": {"n_train": 2000, "n_val": 500, "image_size": 64},
    "paper": {"n_train": 5000, "n_val": 2000, "image_size": 128},
}


@dataclass(frozen=True)
class CollectionConfig:
    """Configuration of a paired data collection.

    Parameters
    ----------
    n_train : int, optional (default: 2000)
        Number of training samples.

    n_val : int, optional (default: 500)
        Number of validation samples.

    seed : int, optional (default: 0)
        Root seed. Every split and every sample derive their own stream.

    geometry : SensorGeometry
        Sensor geometry.

    membrane : MembraneParams
        Coefficients of the synthetic real sensor.

    markers : MarkerGridConfig
        Marker grid of the synthetic real sensor.

    ranges : ContactRanges
        Sampling bounds.

    objects : tuple of CollectionObject
        Objects. Samples cycle through them in order.

    label_dim : int, optional (default: 4)
        Number of label components that estimators use (4 or 6).

    noise_amplitude : float, optional (default: 0)
        Pixel noise of the synthetic real images.

    mount : str, optional (default: 'vertical')
        Sensor mount.

    n_jobs : int, optional (default: 1)
        Number of worker processes.

    max_retries : int, optional (default: 100)
        Attempts per sample to find a configuration in contact.
    """
    n_train: int = 2000
    n_val: int = 500
    seed: int = 0
    geometry: SensorGeometry = field(default_factory=SensorGeometry)
    membrane: MembraneParams = field(default_factory=MembraneParams)
    markers: MarkerGridConfig = field(default_factory=MarkerGridConfig)
    ranges: ContactRanges = field(default_factory=ContactRanges)
    objects: tuple = field(default_factory=default_objects)
    label_dim: int = 4
    noise_amplitude: float = 0.0
    mount: str = "vertical"
    n_jobs: int = 1
    max_retries: int = 100

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if self.n_train < 0 or self.n_val < 0:
            raise ConfigurationError("Sample counts must not be negative")
        if not self.objects:
            raise ConfigurationError("At least one object is required")
        ids = [obj.object_id for obj in self.objects]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("Object ids must be unique, got %s" % ids)
        if self.label_dim not in (4, 6):
            raise ConfigurationError(
                "label_dim must be 4 or 6, got %r" % (self.label_dim,))
        if self.noise_amplitude < 0.0:
            raise ConfigurationError("noise_amplitude must not be negative")
        if self.mount not in MOUNTS:
            raise ConfigurationError("Unknown mount '%s'" % self.mount)
        if self.n_jobs < 1:
            raise ConfigurationError("n_jobs must be at least 1")
        if self.max_retries < 1:
            raise ConfigurationError("max_retries must be at least 1")

    @classmethod
    def preset(cls, name, **kwargs):
        """Configuration of a named preset ('desk' or 'paper').

        Keyword arguments replace fields of the preset.
        """
        if name not in PRESETS:
            raise ConfigurationError(
                "Unknown preset '%s', expected one of %s"
                % (name, sorted(PRESETS)))
        values = dict(PRESETS[name])
        geometry = SensorGeometry(image_size=values.pop("image_size"))
        values["geometry"] = geometry
        values.update(kwargs)
        return cls(**values)

    def contact_types(self):
        return sorted(set(obj.contact_type for obj in self.objects))

    def to_dict(self):
        return {
            "n_train": self.n_train,
            "n_val": self.n_val,
            "seed": self.seed,
            "geometry": self.geometry.to_dict(),
            "membrane": self.membrane.to_dict(),
            "markers": self.markers.to_dict(),
            "ranges": self.ranges.to_dict(),
            "objects": [obj.to_dict() for obj in self.objects],
            "label_dim": self.label_dim,
            "noise_amplitude": self.noise_amplitude,
            "mount": self.mount,
            "n_jobs": self.n_jobs,
            "max_retries": self.max_retries,
        }

    @classmethod
    def from_dict(cls, config):
        """Create a configuration from its dictionary representation.

        Missing entries take their default values.
        """
        config = dict(config)
        nested = {
            "geometry": SensorGeometry,
            "membrane": MembraneParams,
            "markers": MarkerGridConfig,
            "ranges": ContactRanges,
        }
        try:
            for name, config_class in nested.items():
                if name in config:
                    config[name] = config_class(**config[name])
            if "objects" in config:
                config["objects"] = tuple(
                    CollectionObject.from_dict(obj)
                    for obj in config["objects"])
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid collection config: %s" % e)


@dataclass(frozen=True)
class SampleTuple:
    """Paired sample.

    Parameters
    ----------
    sim_image : TactileImage
        Simulated image without shear deformation.

    real_image : TactileImage
        Synthetic real image of the same contact with shear deformation.

    shear : ShearVector
        Shear between first contact and the rendered pose.

    label : ContactLabel
        Ground truth.

    contact_type : str
        Either 'surface' or 'edge'.

    object_id : str
        Object that was touched.

    pose : Pose4, optional (default: None)
        Pose the images were rendered from.

    index : int, optional (default: None)
        Position of the sample in its split.
    """
    sim_image: TactileImage
    real_image: TactileImage
    shear: ShearVector
    label: ContactLabel
    contact_type: str
    object_id: str
    pose: Pose4 = None
    index: int = None

    def __post_init__(self):
        if self.sim_image.shape != self.real_image.shape:
            raise ValueError(
                "Paired images differ in size: %s and %s"
                % (self.sim_image.shape, self.real_image.shape))
        if self.label.shear != self.shear:
            raise ValueError("Label shear %s differs from shear %s"
                             % (self.label.shear, self.shear))


class DatasetManifest:
    """Index of a collected dataset.

    Parameters
    ----------
    config : CollectionConfig
        Configuration the dataset was collected with.

    records : dict
        Per split a list of sample records.

    root : str or Path, optional (default: '.')
        Directory that relative image paths refer to.
    """
    def __init__(self, config, records, root="."):
        self.config = config
        self.records = {split: list(records.get(split, []))
                        for split in SPLITS}
        self.root = Path(root)

    @property
    def counts(self):
        return {split: len(self.records[split]) for split in SPLITS}

    def split(self, name):
        """Records of a split.

        Parameters
        ----------
        name : str
            Either 'train' or 'val'.

        Returns
        -------
        records : list
            Sample records.
        """
        if name not in SPLITS:
            raise ConfigurationError(
                "Unknown split '%s', expected one of %s" % (name, SPLITS))
        return self.records[name]

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "counts": self.counts,
            "config": self.config.to_dict(),
            "records": self.records,
        }

    def save(self, filename):
        """Write the manifest as JSON."""
        save_json(self.to_dict(), filename)

    @classmethod
    def load(cls, filename):
        """Read and validate a manifest.

        Parameters
        ----------
        filename : str or Path
            Manifest file.

        Returns
        -------
        manifest : DatasetManifest
            Manifest. Image paths are relative to its directory.

        Raises
        ------
        DatasetError
            If the file is missing or inconsistent.
        """
        filename = Path(filename)
        content = load_json(filename)
        if content.get("schema_version") != SCHEMA_VERSION:
            raise DatasetError(
                "Manifest '%s' has schema version %r, expected %d"
                % (filename, content.get("schema_version"), SCHEMA_VERSION))
        manifest = cls(CollectionConfig.from_dict(content["config"]),
                       content["records"], filename.parent)
        if manifest.counts != content["counts"]:
            raise DatasetError(
                "Manifest '%s' counts %s do not match its %s records"
                % (filename, content["counts"], manifest.counts))
        return manifest

    def validate(self):
        """Check that all referenced images exist.

        Raises
        ------
        DatasetError
            Naming the first record with a missing image.
        """
        for split in SPLITS:
            for record in self.records[split]:
                for key in ("sim_image", "real_image"):
                    if not (self.root / record[key]).is_file():
                        raise DatasetError(
                            "%s split, missing image '%s'"
                            % (split, record[key]), record["index"])


def _sha256(filename):
    with open(filename, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def sample_seeds(config):
    """Seed sequences of all samples.

    Every split uses its own child of the root seed sequence and every
    sample its own grandchild, so that splits are disjoint and samples
    do not depend on the order in which they are processed.

    Parameters
    ----------
    config : CollectionConfig
        Configuration.

    Returns
    -------
    seeds : dict
        Per split a list of numpy.random.SeedSequence.
    """
    split_seeds = np.random.SeedSequence(config.seed).spawn(len(SPLITS))
    counts = {"train": config.n_train, "val": config.n_val}
    return {split: seq.spawn(counts[split])
            for split, seq in zip(SPLITS, split_seeds)}


def render_sample_images(config, record, grid=None):
    """Render both images of a record from its stored numeric fields.

    Parameters
    ----------
    config : CollectionConfig
        Configuration the record was collected with.

    record : dict
        Sample record.

    grid : MarkerGrid, optional (default: built from config)
        Marker grid.

    Returns
    -------
    sim_image : TactileImage
        Simulated image.

    real_image : TactileImage
        Synthetic real image.
    """
    if grid is None:
        grid = _marker_grid(config.markers, config.geometry)
    objects = {obj.object_id: obj for obj in config.objects}
    shape = objects[record["object_id"]].shape
    depth = render_depth(Pose4.from_array(record["pose"]), shape,
                         config.geometry, config.mount)
    shear = ShearVector.from_array(record["shear"])
    sim_image = sim_tactile_image(depth)
    real_image = real_tactile_oracle(
        depth, shear, grid, config.membrane, config.geometry,
        config.noise_amplitude, record["noise_seed"])
    return sim_image, real_image


@functools.lru_cache(maxsize=4)
def _marker_grid(markers, geometry):
    return markers.build(geometry)


def _collect_sample(config, output_dir, task):
    split, index, seed_sequence = task
    obj = config.objects[index % len(config.objects)]
    contact_seed, noise_seed = seed_sequence.spawn(2)
    try:
        anchor, pose, label = sample_contact(
            obj.shape, config.ranges, contact_seed, config.geometry,
            obj.contact_type, config.mount, config.max_retries)
    except ContactSamplingError as e:
        raise ContactSamplingError(
            "Object '%s', %s sample %d: %s" % (obj.object_id, split, index, e))

    shear = shear_to_sensor_frame(label.shear, config.mount)
    label = replace(label, shear_x=shear.sx, shear_y=shear.sy,
                    shear_z=shear.sz, shear_yaw=shear.syaw)
    record = {
        "index": index,
        "object_id": obj.object_id,
        "contact_type": obj.contact_type,
        "anchor": anchor.to_list(),
        "pose": pose.to_list(),
        "shear": shear.to_list(),
        "label": label.to_dict(),
        "noise_seed": int(noise_seed.generate_state(1)[0]),
    }
    sim_image, real_image = render_sample_images(config, record)

    for key, image in (("sim_image", sim_image), ("real_image", real_image)):
        relative = Path("images") / split / ("%05d_%s.png" % (index, key[:-6]))
        filename = Path(output_dir) / relative
        save_png(filename, image)
        record[key] = relative.as_posix()
        record[key[:-6] + "_sha256"] = _sha256(filename)
    logger.debug("%s sample %d: object %s, label %s",
                 split, index, obj.object_id, label)
    return split, record


def collect_dataset(config, output_dir, verbose=False):
    """Collect a paired dataset.

    For every sample, a contact and a shear are drawn, the depth image is
    rendered at the sheared pose, and the shear-blind simulated image and
    the shear-deformed synthetic real image are generated from this same
    depth image.

    Parameters
    ----------
    config : CollectionConfig
        Configuration.

    output_dir : str or Path
        Directory of the dataset. Must not contain a manifest yet.

    verbose : bool, optional (default: False)
        Show a progress bar.

    Returns
    -------
    manifest : DatasetManifest
        Manifest, also written to output_dir/manifest.json.

    Raises
    ------
    ContactSamplingError
        If a sample could not be brought into contact.
    """
    output_dir = Path(output_dir)
    manifest_path = output_dir / MANIFEST_NAME
    if manifest_path.exists():
        raise ConfigurationError(
            "Refusing to overwrite dataset '%s'" % manifest_path)
    for split in SPLITS:
        (output_dir / "images" / split).mkdir(parents=True, exist_ok=True)
    if len(config.contact_types()) < len(CONTACT_TYPES):
        logger.warning("Collecting only %s contacts",
                       ", ".join(config.contact_types()))

    seeds = sample_seeds(config)
    tasks = [(split, index, seq) for split in SPLITS
             for index, seq in enumerate(seeds[split])]
    worker = functools.partial(_collect_sample, config, output_dir)
    logger.info("Collecting %d training and %d validation samples",
                config.n_train, config.n_val)

    records = {split: [] for split in SPLITS}
    progress = functools.partial(
        tqdm, total=len(tasks), desc="collect", disable=not verbose)
    if config.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=config.n_jobs) as executor:
            chunksize = max(1, len(tasks) // (8 * config.n_jobs))
            for split, record in progress(
                    executor.map(worker, tasks, chunksize=chunksize)):
                records[split].append(record)
    else:
        for split, record in progress(map(worker, tasks)):
            records[split].append(record)

    manifest = DatasetManifest(config, records, output_dir)
    manifest.save(manifest_path)
    logger.info("Wrote dataset manifest to '%s'", manifest_path)
    return manifest


def _load_record(manifest, split, record):
    geom = manifest.config.geometry
    images = []
    for key, domain in (("sim_image", "sim"),
                        ("real_image", "real_synthetic")):
        filename = manifest.root / record[key]
        if not filename.is_file():
            raise DatasetError("%s split, missing image '%s'"
                               % (split, record[key]), record["index"])
        if _sha256(filename) != record[key[:-6] + "_sha256"]:
            raise DatasetError("%s split, checksum mismatch of '%s'"
                               % (split, record[key]), record["index"])
        try:
            values = load_png(filename)
        except DatasetError as e:
            raise DatasetError(str(e), record["index"])
        if values.shape != (geom.image_size, geom.image_size):
            raise DatasetError(
                "%s split, image '%s' has shape %s, expected %d x %d"
                % (split, record[key], values.shape, geom.image_size,
                   geom.image_size), record["index"])
        images.append(TactileImage(values, domain))

    try:
        label = ContactLabel(**record["label"])
        return SampleTuple(
            images[0], images[1], ShearVector.from_array(record["shear"]),
            label, record["contact_type"], record["object_id"],
            Pose4.from_array(record["pose"]), record["index"])
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetError("%s split, malformed record: %s" % (split, e),
                           record["index"])


def load_dataset(manifest_path, split):
    """Load the samples of a split.

    Parameters
    ----------
    manifest_path : str, Path or DatasetManifest
        Manifest file or loaded manifest.

    split : str
        Either 'train' or 'val'.

    Returns
    -------
    samples : generator of SampleTuple
        Samples in manifest order.

    Raises
    ------
    DatasetError
        If an image is missing, corrupted, or has the wrong size.
    """
    manifest = as_manifest(manifest_path)
    for record in manifest.split(split):
        yield _load_record(manifest, split, record)


def load_labels(manifest_path, split, label_dim=None):
    """Load only the numeric fields of a split.

    Parameters
    ----------
    manifest_path : str, Path or DatasetManifest
        Manifest file or loaded manifest.

    split : str
        Either 'train' or 'val'.

    label_dim : int, optional (default: from the collection config)
        Number of label components.

    Returns
    -------
    labels : array, shape (n_samples, label_dim)
        Labels in the order of LABEL_NAMES.

    shears : array, shape (n_samples, 4)
        Shear vectors.

    contact_types : list
        Contact type per sample.

    Raises
    ------
    DatasetError
        If a record lacks a label component or the shear.
    """
    manifest = as_manifest(manifest_path)
    if label_dim is None:
        label_dim = manifest.config.label_dim
    records = manifest.split(split)
    try:
        labels = np.array([[float(record["label"][name])
                            for name in LABEL_NAMES[:label_dim]]
                           for record in records]).reshape(-1, label_dim)
        shears = np.array([record["shear"] for record in records],
                          dtype=float).reshape(-1, 4)
        contact_types = [record["contact_type"] for record in records]
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetError("%s split, malformed record: %s" % (split, e))
    return labels, shears, contact_types


def as_manifest(manifest_path):
    if isinstance(manifest_path, DatasetManifest):
        return manifest_path
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    return DatasetManifest.load(manifest_path)


def load_arrays(manifest_path, split):
    """Load a split into arrays for training and evaluation.

    Parameters
    ----------
    manifest_path : str, Path or DatasetManifest
        Manifest file or loaded manifest.

    split : str
        Either 'train' or 'val'.

    Returns
    -------
    arrays : dict
        'sim' and 'real' of shape (n_samples, H, W), 'shear' of shape
        (n_samples, 4), 'labels' of shape (n_samples, 6) and the list
        'contact_types'.
    """
    manifest = as_manifest(manifest_path)
    size = manifest.config.geometry.image_size
    samples = list(load_dataset(manifest, split))
    return {
        "sim": np.array([s.sim_image.values for s in samples]).reshape(
            -1, size, size),
        "real": np.array([s.real_image.values for s in samples]).reshape(
            -1, size, size),
        "shear": np.array([s.shear.as_array() for s in samples]).reshape(
            -1, 4),
        "labels": np.array([s.label.as_array() for s in samples]).reshape(
            -1, len(LABEL_NAMES)),
        "contact_types": [s.contact_type for s in samples],
    }
