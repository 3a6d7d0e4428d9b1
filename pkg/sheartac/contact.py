"""Contact between the hemispherical sensor tip and rigid objects.

The tip is a sphere of radius ``tip_radius`` whose centre is the position
of a :class:`~sheartac.pose.Pose4`. The square sensing aperture is centred
on the tip axis (-z of the sensor frame) and mapped to the pixel grid. For
every pixel inside the tip disk the penetration of the corresponding point
on the lower hemisphere into the object is the depth of that pixel.
"""
import functools
import logging
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConfigurationError, OverPenetrationError, ContactSamplingError)
from .pose import (
    Pose4, ShearVector, pose_to_transform, contact_shear)
from .utils import points_to_world, rotation_z, fold_half_turn


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SensorGeometry:
    """Geometry of the sensor.

    Parameters
    ----------
    tip_radius : float, optional (default: 10)
        Radius of the hemispherical tip in mm.

    image_size : int, optional (default: 64)
        Height and width of images in pixels.

    sensing_aperture : float, optional (default: 20)
        Edge length of the square footprint mapped to the image in mm.

    max_depth : float, optional (default: 3)
        Depth at which the sensor saturates in mm.
    """
    tip_radius: float = 10.0
    image_size: int = 64
    sensing_aperture: float = 20.0
    max_depth: float = 3.0

    def __post_init__(self):
        if not self.tip_radius > 0.0:
            raise ConfigurationError("tip_radius must be positive")
        if int(self.image_size) != self.image_size or self.image_size < 16:
            raise ConfigurationError(
                "image_size must be an integer >= 16, got %r"
                % (self.image_size,))
        if not self.sensing_aperture > 0.0:
            raise ConfigurationError("sensing_aperture must be positive")
        if not self.max_depth > 0.0:
            raise ConfigurationError("max_depth must be positive")
        object.__setattr__(self, "image_size", int(self.image_size))

    @property
    def pixel_size(self):
        """Edge length of a pixel in mm."""
        return self.sensing_aperture / self.image_size

    def pixel_grid(self):
        """Sensor-plane coordinates of pixel centres.

        Row 0 is at the top of the image (+y), column 0 at the left (-x).

        Returns
        -------
        xs : array, shape (image_size, image_size)
            x-coordinates in mm.

        ys : array, shape (image_size, image_size)
            y-coordinates in mm.
        """
        return _pixel_grid(self.image_size, self.sensing_aperture)

    def to_dict(self):
        return asdict(self)


@functools.lru_cache(maxsize=8)
def _pixel_grid(image_size, sensing_aperture):
    pixel_size = sensing_aperture / image_size
    coords = (np.arange(image_size) + 0.5 - 0.5 * image_size) * pixel_size
    xs, ys = np.meshgrid(coords, -coords)
    xs.setflags(write=False)
    ys.setflags(write=False)
    return xs, ys


@functools.lru_cache(maxsize=8)
def _tip_points(image_size, sensing_aperture, tip_radius):
    xs, ys = _pixel_grid(image_size, sensing_aperture)
    r2 = xs ** 2 + ys ** 2
    mask = r2 < tip_radius ** 2
    tip_points = np.ascontiguousarray(np.column_stack((
        xs[mask], ys[mask], -np.sqrt(tip_radius ** 2 - r2[mask]))))
    mask.setflags(write=False)
    # tip_points stays writable, the numba kernels reject read-only arrays
    return mask, tip_points


class DepthImage:
    """Penetration depth per pixel.

    Parameters
    ----------
    values : array, shape (H, W)
        Depths in mm in [0, max_depth].

    max_depth : float
        Saturation depth in mm.
    """
    def __init__(self, values, max_depth):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("Depth image must be 2D, got shape %s"
                             % (values.shape,))
        if np.any(values < 0.0) or np.any(values > max_depth):
            raise ValueError("Depth values must lie in [0, %g]" % max_depth)
        self.values = values
        self.max_depth = max_depth

    @property
    def shape(self):
        return self.values.shape

    @property
    def in_contact(self):
        """Is any pixel in contact?"""
        return bool(np.any(self.values > 0.0))

    @classmethod
    def zeros(cls, geom):
        return cls(np.zeros((geom.image_size, geom.image_size)),
                   geom.max_depth)


@dataclass(frozen=True)
class ContactRanges:
    """Bounds of the uniform distributions used to sample contacts.

    All members are (low, high) pairs.

    Parameters
    ----------
    indentation : tuple, optional (default: (0.5, 2))
        Indentation at first contact in mm.

    shear_xy : tuple, optional (default: (-3, 3))
        Lateral shear in mm, used for both sx and sy.

    shear_z : tuple, optional (default: (-0.5, 0.5))
        Vertical shear in mm.

    shear_yaw : tuple, optional (default: (-10, 10))
        Rotational shear in degrees.

    edge_angle : tuple, optional (default: (-45, 45))
        Orientation of the sensor relative to the contact feature in
        degrees.

    lateral_offset : tuple, optional (default: (-2, 2))
        Offset of the contact site from the centre of the feature in mm.
    """
    indentation: tuple = (0.5, 2.0)
    shear_xy: tuple = (-3.0, 3.0)
    shear_z: tuple = (-0.5, 0.5)
    shear_yaw: tuple = (-10.0, 10.0)
    edge_angle: tuple = (-45.0, 45.0)
    lateral_offset: tuple = (-2.0, 2.0)

    def __post_init__(self):
        for name, value in asdict(self).items():
            try:
                low, high = (float(v) for v in value)
            except (TypeError, ValueError):
                raise ConfigurationError(
                    "Range '%s' must be a pair (low, high), got %r"
                    % (name, value))
            if not np.isfinite(low) or not np.isfinite(high) or low > high:
                raise ConfigurationError(
                    "Range '%s' must satisfy low <= high, got %r"
                    % (name, value))
            object.__setattr__(self, name, (low, high))
        if self.indentation[0] <= 0.0:
            raise ConfigurationError(
                "Indentation must be positive to keep contact, got %r"
                % (self.indentation,))

    @property
    def shear_scale(self):
        """Largest absolute value per shear component (sx, sy, sz, syaw)."""
        scale = np.array([
            max(abs(v) for v in self.shear_xy),
            max(abs(v) for v in self.shear_xy),
            max(abs(v) for v in self.shear_z),
            max(abs(v) for v in self.shear_yaw)])
        scale[scale == 0.0] = 1.0
        return scale

    def to_dict(self):
        return {k: list(v) for k, v in asdict(self).items()}


LABEL_NAMES = (
    "pose_depth", "pose_angle", "shear_x", "shear_y", "shear_z", "shear_yaw")


@dataclass(frozen=True)
class ContactLabel:
    """Ground truth of a contact.

    Parameters
    ----------
    pose_depth : float
        Indentation of the tip in mm.

    pose_angle : float
        Orientation of the edge relative to the sensor x-axis in degrees,
        folded to [-90, 90). 0 for surfaces.

    shear_x, shear_y, shear_z : float
        Translational shear in mm.

    shear_yaw : float
        Rotational shear in degrees.
    """
    pose_depth: float
    pose_angle: float
    shear_x: float
    shear_y: float
    shear_z: float = 0.0
    shear_yaw: float = 0.0

    def __post_init__(self):
        if self.pose_depth < 0.0:
            raise ValueError("pose_depth must not be negative, got %g"
                             % self.pose_depth)

    @property
    def shear(self):
        return ShearVector(
            self.shear_x, self.shear_y, self.shear_z, self.shear_yaw)

    def as_array(self, label_dim=6):
        if label_dim not in (4, 6):
            raise ValueError("label_dim must be 4 or 6, got %r" % label_dim)
        return np.array([getattr(self, name)
                         for name in LABEL_NAMES[:label_dim]])

    @classmethod
    def from_array(cls, array):
        return cls(*(float(v) for v in array))

    def to_dict(self):
        return asdict(self)


def sdf_eval(shape, point):
    """Signed distance of a point to an object.

    Parameters
    ----------
    shape : ObjectShape
        Object.

    point : array-like, shape (3,)
        Point in the world frame in mm.

    Returns
    -------
    dist : float
        Signed distance in mm, negative inside.
    """
    return float(shape.sdf(point)[0])


def indentation(sensor_pose, shape, geom, mount="vertical"):
    """Geometric indentation of the tip: tip_radius - sdf(tip centre)."""
    center = pose_to_transform(sensor_pose, mount)[:3, 3]
    return geom.tip_radius - sdf_eval(shape, center)


def render_depth(sensor_pose, shape, geom, mount="vertical"):
    """Render the penetration depth of the sensor tip into an object.

    Parameters
    ----------
    sensor_pose : Pose4
        Pose of the tip centre.

    shape : ObjectShape
        Object.

    geom : SensorGeometry
        Sensor geometry.

    mount : str, optional (default: 'vertical')
        Sensor mount.

    Returns
    -------
    depth : DepthImage
        Depth image, all zero without contact.

    Raises
    ------
    OverPenetrationError
        If the tip centre is deeper than the tip radius inside the object.
    """
    sensor2origin = pose_to_transform(sensor_pose, mount)
    center_dist = sdf_eval(shape, sensor2origin[:3, 3])
    if center_dist < -geom.tip_radius:
        raise OverPenetrationError(center_dist)

    depth = DepthImage.zeros(geom)
    if center_dist >= geom.tip_radius:
        return depth

    mask, tip_points = _tip_points(
        geom.image_size, geom.sensing_aperture, geom.tip_radius)
    dist = shape.sdf(points_to_world(sensor2origin, tip_points))
    depth.values[mask] = np.clip(
        -dist, 0.0, min(geom.max_depth, geom.tip_radius))
    return depth


def pose_at_indentation(shape, site, yaw, depth, geom, mount="vertical"):
    """Place the tip on the line through a surface point along the tip axis.

    Parameters
    ----------
    shape : ObjectShape
        Object.

    site : array-like, shape (3,)
        Point on the surface of the object.

    yaw : float
        Yaw of the sensor in degrees.

    depth : float
        Desired indentation in mm, 0 < depth < tip_radius.

    geom : SensorGeometry
        Sensor geometry.

    mount : str, optional (default: 'vertical')
        Sensor mount.

    Returns
    -------
    pose : Pose4
        Pose of the tip centre.
    """
    if not 0.0 < depth < geom.tip_radius:
        raise ValueError("Indentation must be in (0, %g), got %g"
                         % (geom.tip_radius, depth))
    site = np.asarray(site, dtype=np.float64)
    axis = pose_to_transform(Pose4(yaw=yaw), mount)[:3, 2]

    def residual(t):
        return geom.tip_radius - sdf_eval(shape, site + t * axis) - depth

    upper = geom.tip_radius
    for _ in range(30):
        if residual(upper) < 0.0:
            break
        upper *= 2.0
    else:
        raise ContactSamplingError(
            "Could not bracket indentation %g mm at %s" % (depth, site))
    t = brentq(residual, 0.0, upper, xtol=1e-12)
    center = site + t * axis
    return Pose4(center[0], center[1], center[2], yaw)


def sheared_pose(anchor, shear):
    """Pose at which the sensor feels a given shear relative to an anchor.

    Inverse of :func:`~sheartac.pose.contact_shear`.

    Parameters
    ----------
    anchor : Pose4
        Pose at first contact.

    shear : ShearVector
        Shear felt at the returned pose.

    Returns
    -------
    pose : Pose4
        Current pose.
    """
    yaw = anchor.yaw - shear.syaw
    p = anchor.position - np.dot(rotation_z(yaw), shear.as_array()[:3])
    return Pose4(p[0], p[1], p[2], yaw)


def sample_contact(shape, ranges, rng_seed, geom=None, contact_type="surface",
                   mount="vertical", max_retries=100):
    """Sample a contact with an object and a shear offset from it.

    Parameters
    ----------
    shape : ObjectShape
        Object.

    ranges : ContactRanges
        Sampling bounds.

    rng_seed : int, numpy.random.SeedSequence or numpy.random.Generator
        Seed or random number generator.

    geom : SensorGeometry, optional (default: SensorGeometry())
        Sensor geometry.

    contact_type : str, optional (default: 'surface')
        Either 'surface' or 'edge'.

    mount : str, optional (default: 'vertical')
        Sensor mount.

    max_retries : int, optional (default: 100)
        Maximum number of attempts to find a configuration with contact at
        both poses.

    Returns
    -------
    anchor : Pose4
        Pose at first contact.

    sheared : Pose4
        Pose after applying the shear, the pose images are rendered from.

    label : ContactLabel
        Ground truth: pose components at the anchor, shear from the anchor
        to the sheared pose.

    Raises
    ------
    ContactSamplingError
        If no configuration in contact could be found.
    """
    if geom is None:
        geom = SensorGeometry()
    rng = np.random.default_rng(rng_seed)
    for attempt in range(max_retries):
        depth = rng.uniform(*ranges.indentation)
        angle = rng.uniform(*ranges.edge_angle)
        offset = rng.uniform(*ranges.lateral_offset, size=2)
        shear = ShearVector(
            rng.uniform(*ranges.shear_xy), rng.uniform(*ranges.shear_xy),
            rng.uniform(*ranges.shear_z), rng.uniform(*ranges.shear_yaw))

        site, edge_yaw = shape.contact_site(contact_type, offset)
        if contact_type == "edge":
            yaw = edge_yaw - angle
        else:
            yaw = shape.pose.yaw + angle
        anchor = pose_at_indentation(shape, site, yaw, depth, geom, mount)
        sheared = sheared_pose(anchor, shear)

        try:
            in_contact = (
                render_depth(anchor, shape, geom, mount).in_contact
                and render_depth(sheared, shape, geom, mount).in_contact)
        except OverPenetrationError:
            in_contact = False
        if not in_contact:
            logger.debug("Contact lost at sampled shear %s, resampling",
                         shear)
            continue
        if attempt > max_retries // 10:
            logger.warning("Needed %d attempts to sample a contact",
                           attempt + 1)

        if contact_type == "edge":
            pose_angle = fold_half_turn(edge_yaw - anchor.yaw)
        else:
            pose_angle = 0.0
        true_shear = contact_shear(anchor, sheared)
        label = ContactLabel(
            pose_depth=max(0.0, indentation(anchor, shape, geom, mount)),
            pose_angle=pose_angle,
            shear_x=true_shear.sx, shear_y=true_shear.sy,
            shear_z=true_shear.sz, shear_yaw=true_shear.syaw)
        return anchor, sheared, label

    raise ContactSamplingError(
        "No %s contact with %r after %d attempts, ranges: %s"
        % (contact_type, shape, max_retries, ranges.to_dict()))
