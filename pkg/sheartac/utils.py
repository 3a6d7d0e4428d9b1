"""Utility functions."""
import numba
import numpy as np
import pytransform3d.rotations as pr


EPSILON = np.finfo(float).eps


def wrap_angle(angle):
    """Wrap angle in degrees to [-180, 180).

    Parameters
    ----------
    angle : float or array-like
        Angle(s) in degrees.

    Returns
    -------
    wrapped : float or array
        Angle(s) in [-180, 180).
    """
    wrapped = np.mod(np.asarray(angle, dtype=float) + 180.0, 360.0) - 180.0
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def fold_half_turn(angle):
    """Fold an undirected line angle in degrees to [-90, 90).

    Parameters
    ----------
    angle : float
        Angle in degrees.

    Returns
    -------
    folded : float
        Angle in [-90, 90) that describes the same line.
    """
    return float(np.mod(angle + 90.0, 180.0) - 90.0)


def rotation_z(yaw):
    """Rotation matrix about the z-axis.

    Parameters
    ----------
    yaw : float
        Angle in degrees.

    Returns
    -------
    R : array, shape (3, 3)
        Rotation matrix.
    """
    return pr.active_matrix_from_angle(2, np.deg2rad(yaw))


_POINT_MAPPING = numba.float64[:, :](
    numba.float64[:, ::1], numba.float64[:, ::1])


@numba.njit(_POINT_MAPPING, cache=True)
def points_to_world(local2world, points):
    """Map points given in a local frame (sensor, object) to the world frame.

    Parameters
    ----------
    local2world : array, shape (4, 4)
        Pose of the local frame in the world frame.

    points : array, shape (n_points, 3)
        Points in the local frame, in millimetres.

    Returns
    -------
    world_points : array, shape (n_points, 3)
        The same points in the world frame.
    """
    return np.dot(points, local2world[:3, :3].T) + local2world[:3, 3]


@numba.njit(_POINT_MAPPING, cache=True)
def points_to_local(local2world, world_points):
    """Inverse of :func:`points_to_world`."""
    return np.dot(world_points - local2world[:3, 3], local2world[:3, :3])


def as_points(points):
    """Convert input to a C-contiguous float array of shape (n_points, 3)."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if not points.flags.writeable:
        points = points.copy()
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError(
            "Expected points of shape (n_points, 3), got %s"
            % (points.shape,))
    return points
