import numba
import numpy as np


@numba.njit(numba.float64[::1](numba.float64[:, ::1], numba.float64[::1]),
            cache=True)
def box_sdf(points, size):
    """Signed distance of points to an axis-aligned box centered at origin.

    Parameters
    ----------
    points : array, shape (n_points, 3)
        Points in the box frame.

    size : array, shape (3,)
        Full edge lengths of the box.

    Returns
    -------
    dist : array, shape (n_points,)
        Signed distances.
    """
    half_size = 0.5 * size
    dist = np.empty(len(points))
    for i in range(len(points)):
        outside = 0.0
        inside = -np.inf
        for d in range(3):
            q = abs(points[i, d]) - half_size[d]
            if q > 0.0:
                outside += q * q
            if q > inside:
                inside = q
        if inside > 0.0:
            dist[i] = np.sqrt(outside)
        else:
            dist[i] = inside
    return dist
