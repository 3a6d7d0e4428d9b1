"""Rigid objects described by signed distance functions."""
import abc

import numpy as np

from .errors import ConfigurationError
from .pose import Pose4, pose_to_transform, compose_poses
from .sdf import half_space_sdf, box_sdf, ellipsoid_sdf, point_to_ellipsoid
from .utils import as_points, points_to_local, points_to_world


CONTACT_TYPES = ("surface", "edge")


class ObjectShape(abc.ABC):
    """Rigid object placed in the world frame.

    Parameters
    ----------
    pose : Pose4, optional (default: identity)
        Pose of the object frame.
    """
    kind = None

    def __init__(self, pose=None):
        if pose is None:
            pose = Pose4()
        self.pose = pose
        self._object2origin = pose_to_transform(pose)

    def object2origin(self):
        """Get the transformation matrix of the object.

        Returns
        -------
        object2origin : array, shape (4, 4)
            Pose of the object.
        """
        return self._object2origin

    def sdf(self, points):
        """Signed distance of points to the object.

        Parameters
        ----------
        points : array, shape (n_points, 3) or (3,)
            Points in the world frame.

        Returns
        -------
        dist : array, shape (n_points,)
            Signed distances in mm, negative inside of the object.
        """
        points_in_object = np.ascontiguousarray(points_to_local(
            self._object2origin, as_points(points)))
        return self._local_sdf(points_in_object)

    @abc.abstractmethod
    def _local_sdf(self, points):
        """Signed distance of points given in the object frame."""

    @property
    @abc.abstractmethod
    def dimensions(self):
        """Dimensions in mm by name."""

    @abc.abstractmethod
    def contact_site(self, contact_type, offset=(0.0, 0.0)):
        """Point on the top of the object where a contact of a type is made.

        Parameters
        ----------
        contact_type : str
            Either 'surface' or 'edge'.

        offset : array-like, shape (2,), optional (default: [0, 0])
            Lateral offset of the site in mm. Edges only use the first
            component, which moves the site along the edge.

        Returns
        -------
        site : array, shape (3,)
            Site in the world frame.

        edge_yaw : float
            Direction of the edge in the world frame in degrees, 0 for
            surfaces.
        """

    def moved(self, carrier_pose):
        """Object carried by a frame, e.g., the leader's tool.

        Parameters
        ----------
        carrier_pose : Pose4
            Pose of the carrying frame. The pose of this object is
            interpreted relative to it.

        Returns
        -------
        shape : ObjectShape
            Object of the same kind in the world frame.
        """
        return self.__class__(
            pose=compose_poses(carrier_pose, self.pose), **self.dimensions)

    def to_dict(self):
        config = {"kind": self.kind, "pose": self.pose.to_list()}
        config.update({k: np.asarray(v).tolist()
                       for k, v in self.dimensions.items()})
        return config

    def _site_to_world(self, site_in_object):
        return points_to_world(
            self._object2origin,
            np.ascontiguousarray(site_in_object, dtype=np.float64)[np.newaxis]
        )[0]

    def __repr__(self):
        dims = ", ".join("%s=%s" % (k, np.asarray(v).tolist())
                         for k, v in self.dimensions.items())
        return "%s(pose=%r, %s)" % (
            self.__class__.__name__, self.pose, dims)


def _positive(name, values, n):
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.shape != (n,) or not np.all(np.isfinite(values)) \
            or np.any(values <= 0.0):
        raise ConfigurationError(
            "%s must be %d strictly positive finite values, got %s"
            % (name, n, values.tolist()))
    return np.ascontiguousarray(values)


class HalfSpace(ObjectShape):
    """Everything below the xy-plane of the object frame.

    Parameters
    ----------
    pose : Pose4, optional (default: identity)
        Pose of the object frame.
    """
    kind = "half-space"

    def _local_sdf(self, points):
        return half_space_sdf(points)

    @property
    def dimensions(self):
        return {}

    def contact_site(self, contact_type, offset=(0.0, 0.0)):
        if contact_type != "surface":
            raise ConfigurationError(
                "A half-space only offers surface contacts")
        return self._site_to_world([offset[0], offset[1], 0.0]), 0.0


class Box(ObjectShape):
    """Box centered at the origin of its frame.

    Parameters
    ----------
    pose : Pose4, optional (default: identity)
        Pose of the object frame.

    size : array-like, shape (3,)
        Full edge lengths in mm.
    """
    kind = "box"

    def __init__(self, pose=None, size=(40.0, 40.0, 40.0)):
        super(Box, self).__init__(pose)
        self.size = _positive("size", size, 3)

    def _local_sdf(self, points):
        return box_sdf(points, self.size)

    @property
    def dimensions(self):
        return {"size": self.size}

    def contact_site(self, contact_type, offset=(0.0, 0.0)):
        half_size = 0.5 * self.size
        if contact_type == "surface":
            site = [offset[0], offset[1], half_size[2]]
            edge_yaw = 0.0
        elif contact_type == "edge":
            # top edge at +y, running along x
            site = [offset[0], half_size[1], half_size[2]]
            edge_yaw = self.pose.yaw
        else:
            raise ConfigurationError(
                "Unknown contact type '%s'" % contact_type)
        return self._site_to_world(site), edge_yaw


class Ellipsoid(ObjectShape):
    """Ellipsoid centered at the origin of its frame.

    Parameters
    ----------
    pose : Pose4, optional (default: identity)
        Pose of the object frame.

    radii : array-like, shape (3,)
        Semi-axes in mm.
    """
    kind = "ellipsoid"

    def __init__(self, pose=None, radii=(1.0, 1.0, 1.0)):
        super(Ellipsoid, self).__init__(pose)
        self.radii = _positive("radii", radii, 3)

    def _local_sdf(self, points):
        return ellipsoid_sdf(points, self.radii)

    @property
    def dimensions(self):
        return {"radii": self.radii}

    def contact_site(self, contact_type, offset=(0.0, 0.0)):
        if contact_type != "surface":
            raise ConfigurationError(
                "An ellipsoid only offers surface contacts")
        # surface point closest to the offset point on the top tangent plane
        above = self._site_to_world([offset[0], offset[1], self.radii[2]])
        _, site = point_to_ellipsoid(above, self._object2origin, self.radii)
        return site, 0.0


SHAPES = {cls.kind: cls for cls in (HalfSpace, Box, Ellipsoid)}


def shape_from_dict(config):
    """Create an object from its dictionary representation.

    Parameters
    ----------
    config : dict
        Contains 'kind', optionally 'pose' as [x, y, z, yaw] and the
        dimensions of the kind ('size' for boxes, 'radii' for ellipsoids).

    Returns
    -------
    shape : ObjectShape
        Object.

    Raises
    ------
    ConfigurationError
        If the kind is unknown or dimensions are invalid.
    """
    config = dict(config)
    kind = config.pop("kind", None)
    if kind not in SHAPES:
        raise ConfigurationError(
            "Unknown shape kind '%s', expected one of %s"
            % (kind, sorted(SHAPES)))
    pose = Pose4.from_array(config.pop("pose", [0.0, 0.0, 0.0, 0.0]))
    try:
        return SHAPES[kind](pose=pose, **config)
    except TypeError as e:
        raise ConfigurationError("Invalid dimensions for %s: %s" % (kind, e))
