import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from ._control import ServoGains, ShearAnchor, servo_step
from ._error import tracking_error
from ._trajectories import TrajectorySpec, leader_trajectory
from .. import __version__
from ..contact import (
    SensorGeometry, ContactLabel, render_depth, indentation,
    pose_at_indentation)
from ..errors import ConfigurationError, ContactLostError, DatasetError
from ..estimate import OracleEstimator, TrainedEstimator
from ..io import write_json_lines, read_json_lines
from ..pose import (
    Pose4, ShearVector, relative_pose, shear_to_sensor_frame,
    mount_rotation)
from ..sensor import MarkerGridConfig, MembraneParams, real_tactile_oracle
from ..shapes import ObjectShape, Box, Ellipsoid, shape_from_dict
from ..utils import rotation_z


logger = logging.getLogger(__name__)


TASKS = ("tracking", "colift")
TASK_MOUNTS = {"tracking": "vertical", "colift": "horizontal"}
LOG_SCHEMA_VERSION = 1


def task_objects():
    """Named objects carried by the leader.

    Objects are given in the leader frame. The touched face passes through
    the leader origin: the top face for tracking, the face towards +y for
    co-lifting.

    Returns
    -------
    objects : dict
        Objects by name.
    """
    return {
        "box": Box(Pose4(z=-10.0), size=(30.0, 30.0, 20.0)),
        "square_prism": Box(Pose4(y=-15.0), size=(30.0, 30.0, 60.0)),
        "egg": Ellipsoid(Pose4(y=-20.0), radii=(25.0, 20.0, 30.0)),
    }


DEFAULT_OBJECTS = {"tracking": "box", "colift": "square_prism"}


def _as_shape(value):
    if isinstance(value, ObjectShape):
        return value
    if isinstance(value, str):
        objects = task_objects()
        if value not in objects:
            raise ConfigurationError(
                "Unknown task object '%s', expected one of %s"
                % (value, sorted(objects)))
        return objects[value]
    return shape_from_dict(value)


@dataclass(frozen=True)
class TaskConfig:
    """Configuration of a leader/follower task.

    Parameters
    ----------
    task : str, optional (default: 'tracking')
        Either 'tracking' (vertical mount) or 'colift' (horizontal mount).

    trajectory : TrajectorySpec, optional
        Path of the leader.

    shape : ObjectShape or str, optional (default: task default)
        Object in the leader frame or the name of one of
        :func:`task_objects`.

    gravity_shear_bias : float, optional (default: 0)
        Constant downward shear in mm that the weight of the object adds
        to the sensed shear. Must be 0 for tracking.

    estimator : str, optional (default: 'oracle')
        Path of an estimator checkpoint or 'oracle' for the true labels.

    gains : ServoGains, optional
        Controller gains.

    geometry : SensorGeometry, optional
        Sensor geometry.

    markers : MarkerGridConfig, optional
        Marker grid of the oracle sensor.

    membrane : MembraneParams, optional
        Membrane of the oracle sensor.

    initial_depth : float, optional (default: gains.depth_reference)
        Indentation at the start in mm.

    noise_amplitude : float, optional (default: 0)
        Pixel noise of the oracle images.

    seed : int, optional (default: 0)
        Seed of the pixel noise.
    """
    task: str = "tracking"
    trajectory: TrajectorySpec = field(default_factory=TrajectorySpec)
    shape: ObjectShape = None
    gravity_shear_bias: float = 0.0
    estimator: str = "oracle"
    gains: ServoGains = field(default_factory=ServoGains)
    geometry: SensorGeometry = field(default_factory=SensorGeometry)
    markers: MarkerGridConfig = field(default_factory=MarkerGridConfig)
    membrane: MembraneParams = field(default_factory=MembraneParams)
    initial_depth: float = None
    noise_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigurationError(
                "Unknown task '%s', expected one of %s" % (self.task, TASKS))
        if self.shape is None:
            object.__setattr__(
                self, "shape", _as_shape(DEFAULT_OBJECTS[self.task]))
        else:
            object.__setattr__(self, "shape", _as_shape(self.shape))
        if self.task == "tracking" and self.gravity_shear_bias != 0.0:
            raise ConfigurationError(
                "gravity_shear_bias is only defined for co-lifting")
        if self.initial_depth is None:
            object.__setattr__(
                self, "initial_depth", self.gains.depth_reference)
        if not 0.0 < self.initial_depth < self.geometry.tip_radius:
            raise ConfigurationError(
                "initial_depth must lie in (0, %g), got %r"
                % (self.geometry.tip_radius, self.initial_depth))
        if self.noise_amplitude < 0.0:
            raise ConfigurationError("noise_amplitude must not be negative")
        object.__setattr__(self, "estimator", str(self.estimator))

    @property
    def mount(self):
        return TASK_MOUNTS[self.task]

    def to_dict(self):
        return {
            "task": self.task,
            "trajectory": self.trajectory.to_dict(),
            "shape": self.shape.to_dict(),
            "gravity_shear_bias": self.gravity_shear_bias,
            "estimator": self.estimator,
            "gains": self.gains.to_dict(),
            "geometry": self.geometry.to_dict(),
            "markers": self.markers.to_dict(),
            "membrane": self.membrane.to_dict(),
            "initial_depth": self.initial_depth,
            "noise_amplitude": self.noise_amplitude,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, config):
        """Create a configuration from its dictionary representation.

        Missing entries take their default values.
        """
        config = dict(config)
        nested = {
            "trajectory": TrajectorySpec.from_dict,
            "gains": ServoGains.from_dict,
            "geometry": lambda c: SensorGeometry(**c),
            "markers": lambda c: MarkerGridConfig(**c),
            "membrane": lambda c: MembraneParams(**c),
        }
        try:
            for name, from_dict in nested.items():
                if name in config and isinstance(config[name], dict):
                    config[name] = from_dict(config[name])
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid task config: %s" % e)


class TaskLog:
    """Record of a task run.

    Parameters
    ----------
    header : dict
        Configuration, gains, contact offset and the tracking error.

    cycles : list of dict
        One entry per control cycle with the leader pose, the follower pose
        after the action, the sensed label, the prediction and the action.
    """
    def __init__(self, header, cycles):
        self.header = header
        self.cycles = cycles

    @property
    def task(self):
        return self.header["task"]

    @property
    def contact_offset(self):
        return Pose4.from_array(self.header["contact_offset"])

    def leader_poses(self):
        """Leader poses, array of shape (n_cycles, 4)."""
        return np.array([c["leader"] for c in self.cycles]).reshape(-1, 4)

    def follower_poses(self):
        """Follower poses after each action, array of shape (n_cycles, 4)."""
        return np.array([c["follower"] for c in self.cycles]).reshape(-1, 4)

    def tracking_error(self):
        """Recompute the tracking error from the logged poses."""
        return tracking_error(self.leader_poses(), self.follower_poses(),
                              self.contact_offset)

    def save(self, filename):
        """Write the log as JSON lines, header first."""
        write_json_lines([self.header] + self.cycles, filename)

    @classmethod
    def load(cls, filename):
        """Load a log.

        Raises
        ------
        DatasetError
            If the file is not a task log of the supported version.
        """
        lines = read_json_lines(filename)
        if not lines or lines[0].get("type") != "header":
            raise DatasetError("'%s' does not start with a task log header"
                               % filename)
        header = lines[0]
        if header.get("schema_version") != LOG_SCHEMA_VERSION:
            raise DatasetError(
                "Task log schema version %r is not supported, expected %d"
                % (header.get("schema_version"), LOG_SCHEMA_VERSION))
        cycles = lines[1:]
        for i, cycle in enumerate(cycles):
            if cycle.get("type") != "cycle" or "leader" not in cycle \
                    or "follower" not in cycle:
                raise DatasetError("Line %d is not a control cycle" % (i + 2))
        return cls(header, cycles)


def load_task_estimator(config):
    """Estimator selected by a task configuration.

    Parameters
    ----------
    config : TaskConfig
        Configuration.

    Returns
    -------
    estimator : Estimator
        Oracle or trained estimator.

    Raises
    ------
    ConfigurationError
        If the estimator expects another image size than the sensor has.
    """
    if config.estimator == "oracle":
        return OracleEstimator(label_dim=6)
    estimator = TrainedEstimator(config.estimator)
    if estimator.checkpoint.config.image_size != config.geometry.image_size:
        raise ConfigurationError(
            "Estimator expects %d px images, the sensor renders %d px"
            % (estimator.checkpoint.config.image_size,
               config.geometry.image_size))
    return estimator


def gravity_shear(bias, yaw, mount):
    """Shear in the sensor frame caused by the weight of a held object.

    Parameters
    ----------
    bias : float
        Magnitude in mm, the contact is dragged downwards.

    yaw : float
        Yaw of the sensor in degrees.

    mount : str
        Sensor mount.

    Returns
    -------
    shear : ShearVector
        Shear, (0, bias, 0, 0) for the horizontal mount at zero yaw.
    """
    tool = np.dot(rotation_z(-yaw), [0.0, 0.0, -bias])
    return shear_to_sensor_frame(ShearVector(*tool), mount)


def move_sensor(pose, delta, mount):
    """Apply a sensor-frame motion.

    Parameters
    ----------
    pose : Pose4
        Current pose.

    delta : Pose4
        Translation in the sensor frame and yaw change.

    mount : str
        Sensor mount.

    Returns
    -------
    pose : Pose4
        New pose.
    """
    translation = np.dot(np.dot(rotation_z(pose.yaw), mount_rotation(mount)),
                         delta.position)
    p = pose.position + translation
    return Pose4(p[0], p[1], p[2], pose.yaw + delta.yaw)


def _run_task(config, estimator, verbose):
    if estimator is None:
        estimator = load_task_estimator(config)
    geom = config.geometry
    mount = config.mount
    grid = config.markers.build(geom)
    spec = config.trajectory
    gains = config.gains

    leader = spec.home
    follower = pose_at_indentation(
        config.shape.moved(leader), leader.position, leader.yaw,
        config.initial_depth, geom, mount)
    contact_offset = relative_pose(leader, follower)
    anchor = ShearAnchor()
    anchor.update(contact_offset, True)
    noise_seeds = np.random.SeedSequence(config.seed).generate_state(
        max(1, spec.n_steps))

    logger.info("Running %s task on a %s trajectory with %d cycles",
                config.task, spec.name, spec.n_steps)
    cycles = []
    for step, t in enumerate(tqdm(spec.times, desc=config.task,
                                  disable=not verbose)):
        leader = leader_trajectory(spec, t)
        shape = config.shape.moved(leader)
        depth = render_depth(follower, shape, geom, mount)
        if not depth.in_contact:
            raise ContactLostError(step)

        shear = shear_to_sensor_frame(
            anchor.update(relative_pose(leader, follower), True), mount)
        if config.gravity_shear_bias != 0.0:
            shear = shear + gravity_shear(
                config.gravity_shear_bias, follower.yaw, mount)
        label = ContactLabel(
            pose_depth=max(0.0, indentation(follower, shape, geom, mount)),
            pose_angle=0.0, shear_x=shear.sx, shear_y=shear.sy,
            shear_z=shear.sz, shear_yaw=shear.syaw)
        image = real_tactile_oracle(
            depth, shear, grid, config.membrane, geom,
            config.noise_amplitude, int(noise_seeds[step]))

        prediction = estimator.predict(image, label)
        delta = servo_step(prediction, gains)
        follower = move_sensor(follower, delta, mount)
        logger.debug("cycle %d: label %s, action %s", step, label, delta)
        cycles.append({
            "type": "cycle",
            "step": step,
            "time": float(t),
            "leader": leader.to_list(),
            "follower": follower.to_list(),
            "label": label.to_dict(),
            "prediction": prediction.to_dict(),
            "delta": delta.to_list(),
        })

    header = {
        "type": "header",
        "schema_version": LOG_SCHEMA_VERSION,
        "version": __version__,
        "task": config.task,
        "mount": mount,
        "config": config.to_dict(),
        "gains": gains.to_dict(),
        "contact_offset": contact_offset.to_list(),
    }
    log = TaskLog(header, cycles)
    error = log.tracking_error()
    for cycle, distance in zip(cycles, error.series):
        cycle["error"] = float(distance)
    header["error"] = {"mean": error.mean, "std": error.std}
    logger.info("%s task on %s trajectory: %s", config.task, spec.name, error)
    return error, log


def run_tracking_task(config, estimator=None, verbose=False):
    """Follow the surface of an object that the leader moves.

    In every control cycle the leader moves, the follower's sensor renders
    the contact, the oracle sensor synthesizes a tactile image with shear,
    the estimator predicts pose and shear, and the controller moves the
    follower.

    Parameters
    ----------
    config : TaskConfig
        Tracking configuration.

    estimator : Estimator, optional (default: from config)
        Replaces the estimator of the configuration.

    verbose : bool, optional (default: False)
        Show a progress bar.

    Returns
    -------
    error : TrackingError
        Distance between follower and target after each action.

    log : TaskLog
        Record of the run.

    Raises
    ------
    ContactLostError
        If the follower loses contact.

    OverPenetrationError
        If the follower presses too deep into the object.
    """
    if config.task != "tracking":
        raise ConfigurationError("Expected a tracking task, got '%s'"
                                 % config.task)
    return _run_task(config, estimator, verbose)


def run_colift_task(config, estimator=None, verbose=False):
    """Hold an object together with the leader while it moves.

    The loop is the same as in :func:`run_tracking_task` with a horizontal
    sensor mount and the weight of the object added as a constant
    downward shear.

    Parameters
    ----------
    config : TaskConfig
        Co-lift configuration.

    estimator : Estimator, optional (default: from config)
        Replaces the estimator of the configuration.

    verbose : bool, optional (default: False)
        Show a progress bar.

    Returns
    -------
    error : TrackingError
        Distance between follower and target after each action.

    log : TaskLog
        Record of the run.

    Raises
    ------
    ContactLostError
        If the follower drops the object.
    """
    if config.task != "colift":
        raise ConfigurationError("Expected a co-lift task, got '%s'"
                                 % config.task)
    return _run_task(config, estimator, verbose)


def run_task(config, estimator=None, verbose=False):
    """Run a tracking or co-lift task depending on the configuration."""
    if config.task == "tracking":
        return run_tracking_task(config, estimator, verbose)
    return run_colift_task(config, estimator, verbose)


def run_tasks(configs, n_jobs=1):
    """Run independent tasks, in parallel processes if n_jobs > 1.

    Parameters
    ----------
    configs : list of TaskConfig
        Tasks.

    n_jobs : int, optional (default: 1)
        Number of worker processes.

    Returns
    -------
    results : list of tuple
        (TrackingError, TaskLog) per task, in the order of the configs.
    """
    if n_jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as executor:
            return list(executor.map(run_task, configs))
    return [run_task(config) for config in configs]
