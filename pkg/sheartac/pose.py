"""4-DoF poses and shear vectors.

A :class:`Pose4` describes the position (x, y, z) in mm and the rotation
about the world z-axis (yaw) in degrees, which are the axes a desktop
4-axis arm can actuate. The sensor frame is the tool frame rotated by a
fixed mount rotation, see :data:`MOUNTS`. The tip of the sensor points
along the -z axis of the sensor frame.
"""
from dataclasses import dataclass

import numpy as np
import pytransform3d.rotations as pr
import pytransform3d.transformations as pt

from .utils import wrap_angle, rotation_z


MOUNTS = {
    # tip axis along world -z
    "vertical": np.eye(3),
    # tip axis along world -y, sensor y axis along world -z
    "horizontal": pr.active_matrix_from_angle(0, -0.5 * np.pi),
}


def mount_rotation(mount):
    """Rotation from the sensor frame to the tool frame.

    Parameters
    ----------
    mount : str
        Name of the mount, one of 'vertical' or 'horizontal'.

    Returns
    -------
    R : array, shape (3, 3)
        Mount rotation.
    """
    try:
        return MOUNTS[mount]
    except KeyError:
        raise ValueError("Unknown mount '%s', expected one of %s"
                         % (mount, sorted(MOUNTS)))


@dataclass(frozen=True)
class Pose4:
    """Position in mm and yaw in degrees.

    The yaw is normalized to [-180, 180) on construction.
    """
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        values = (self.x, self.y, self.z, self.yaw)
        if not np.all(np.isfinite(values)):
            raise ValueError("Pose components must be finite, got %s"
                             % (values,))
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    @property
    def position(self):
        return np.array([self.x, self.y, self.z])

    def as_array(self):
        return np.array([self.x, self.y, self.z, self.yaw])

    @classmethod
    def from_array(cls, array):
        x, y, z, yaw = np.asarray(array, dtype=float)
        return cls(x, y, z, yaw)

    def to_list(self):
        return [self.x, self.y, self.z, self.yaw]


@dataclass(frozen=True)
class ShearVector:
    """Displacement since first contact: (sx, sy, sz) in mm, syaw in degrees.

    ``sz > 0`` means that the contact moved towards the sensor, i.e., the
    indentation increased.
    """
    sx: float = 0.0
    sy: float = 0.0
    sz: float = 0.0
    syaw: float = 0.0

    def __post_init__(self):
        values = (self.sx, self.sy, self.sz, self.syaw)
        if not np.all(np.isfinite(values)):
            raise ValueError("Shear components must be finite, got %s"
                             % (values,))
        for name in ("sx", "sy", "sz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "syaw", wrap_angle(self.syaw))

    def as_array(self):
        return np.array([self.sx, self.sy, self.sz, self.syaw])

    @classmethod
    def from_array(cls, array):
        sx, sy, sz, syaw = np.asarray(array, dtype=float)
        return cls(sx, sy, sz, syaw)

    def to_list(self):
        return [self.sx, self.sy, self.sz, self.syaw]

    def __add__(self, other):
        return ShearVector.from_array(self.as_array() + other.as_array())


def pose_to_transform(pose, mount="vertical"):
    """Transformation from the sensor frame to the world frame.

    Parameters
    ----------
    pose : Pose4
        Pose of the tool.

    mount : str, optional (default: 'vertical')
        Sensor mount.

    Returns
    -------
    sensor2origin : array, shape (4, 4)
        Pose of the sensor frame.
    """
    R = np.dot(rotation_z(pose.yaw), mount_rotation(mount))
    return pt.transform_from(R=R, p=pose.position)


def compose_poses(a, b):
    """Apply pose b in the frame given by pose a.

    Parameters
    ----------
    a : Pose4
        Outer pose.

    b : Pose4
        Inner pose, expressed in the frame of a.

    Returns
    -------
    a_b : Pose4
        Composition a * b.
    """
    p = a.position + np.dot(rotation_z(a.yaw), b.position)
    return Pose4(p[0], p[1], p[2], a.yaw + b.yaw)


def invert_pose(a):
    """Inverse 4-DoF pose.

    Parameters
    ----------
    a : Pose4
        Pose.

    Returns
    -------
    a_inv : Pose4
        Inverse, compose_poses(a, a_inv) is the identity.
    """
    p = -np.dot(rotation_z(-a.yaw), a.position)
    return Pose4(p[0], p[1], p[2], -a.yaw)


def relative_pose(reference, pose):
    """Express pose in the frame of reference.

    Parameters
    ----------
    reference : Pose4
        Reference pose.

    pose : Pose4
        Pose in the world frame.

    Returns
    -------
    pose_in_reference : Pose4
        Pose in the frame of the reference.
    """
    p = np.dot(rotation_z(-reference.yaw),
               pose.position - reference.position)
    return Pose4(p[0], p[1], p[2], pose.yaw - reference.yaw)


def compute_shear_pose(anchor, current):
    """Displacement of current relative to anchor in the anchor's frame.

    Parameters
    ----------
    anchor : Pose4
        Pose at first contact.

    current : Pose4
        Current pose.

    Returns
    -------
    shear : ShearVector
        Translation R(-anchor.yaw) (current.xyz - anchor.xyz) and rotation
        current.yaw - anchor.yaw.
    """
    rel = relative_pose(anchor, current)
    return ShearVector(rel.x, rel.y, rel.z, rel.yaw)


def contact_shear(anchor, current):
    """Shear that the sensor at the current pose feels.

    This is the displacement of the first-contact frame seen from the current
    sensor frame, i.e., how far the contact surface has been dragged relative
    to the sensor since first contact. Markers move in the direction of this
    vector and moving the sensor along it re-centers the contact.

    Parameters
    ----------
    anchor : Pose4
        Pose at first contact.

    current : Pose4
        Current pose.

    Returns
    -------
    shear : ShearVector
        Shear label.
    """
    return compute_shear_pose(current, anchor)


def shear_to_sensor_frame(shear, mount):
    """Express a tool-frame shear in the sensor frame of a mount.

    Parameters
    ----------
    shear : ShearVector
        Shear in the tool frame.

    mount : str
        Sensor mount.

    Returns
    -------
    shear : ShearVector
        Shear with the translational part rotated into the sensor frame.
    """
    s = np.dot(mount_rotation(mount).T, shear.as_array()[:3])
    return ShearVector(s[0], s[1], s[2], shear.syaw)
