import numba
import numpy as np


def half_space_sdf(points, plane_point=None, plane_normal=None):
    """Signed distance of points to a half-space.

    Parameters
    ----------
    points : array, shape (n_points, 3)
        Points.

    plane_point : array, shape (3,), optional (default: origin)
        Point on the boundary plane.

    plane_normal : array, shape (3,), optional (default: [0, 0, 1])
        Outward normal of the boundary plane. We assume unit length.

    Returns
    -------
    dist : array, shape (n_points,)
        Signed distances, negative below the plane.
    """
    if plane_point is None:
        plane_point = np.zeros(3)
    if plane_normal is None:
        plane_normal = np.array([0.0, 0.0, 1.0])
    return _half_space_sdf(
        np.ascontiguousarray(points, dtype=np.float64),
        np.ascontiguousarray(plane_point, dtype=np.float64),
        np.ascontiguousarray(plane_normal, dtype=np.float64))


@numba.njit(
    numba.float64[::1](
        numba.float64[:, ::1], numba.float64[::1], numba.float64[::1]),
    cache=True)
def _half_space_sdf(points, plane_point, plane_normal):
    return np.dot(points - plane_point, plane_normal)
