import math

import numba
import numpy as np

from ..utils import points_to_local


# bisection on doubles terminates long before this
_MAX_ITER = 1100


def point_to_ellipsoid(point, ellipsoid2origin, radii):
    """Compute the signed distance between point and ellipsoid surface.

    Implementation adapted from 'Distance from a Point to an Ellipse, an
    Ellipsoid, or a Hyperellipsoid' by David H. Eberly, Geometric Tools.
    In contrast to Newton's method, the robust bisection converges for
    points inside and outside of the ellipsoid.

    Parameters
    ----------
    point : array, shape (3,)
        3D point.

    ellipsoid2origin : array, shape (4, 4)
        Pose of the ellipsoid.

    radii : array, shape (3,)
        Radii of the ellipsoid.

    Returns
    -------
    dist : float
        Signed distance, negative inside of the ellipsoid.

    closest_point_ellipsoid : array, shape (3,)
        Closest point on the surface of the ellipsoid.
    """
    point_in_ellipsoid = points_to_local(
        np.ascontiguousarray(ellipsoid2origin, dtype=np.float64),
        np.ascontiguousarray(point, dtype=np.float64).reshape(1, 3))[0]
    radii = np.ascontiguousarray(radii, dtype=np.float64)

    order = np.argsort(-radii)
    e = radii[order]
    y = np.abs(point_in_ellipsoid[order])
    dist, x0, x1, x2 = _point_to_ellipsoid(
        e[0], e[1], e[2], y[0], y[1], y[2])
    if np.sum((y / e) ** 2) < 1.0:
        dist = -dist

    closest_point_in_ellipsoid = np.empty(3)
    closest_point_in_ellipsoid[order] = np.copysign(
        np.array([x0, x1, x2]), point_in_ellipsoid[order])
    closest_point_ellipsoid = (
        ellipsoid2origin[:3, 3]
        + np.dot(ellipsoid2origin[:3, :3], closest_point_in_ellipsoid))
    return dist, closest_point_ellipsoid


@numba.njit(cache=True)
def _robust_length2(a, b):
    m = max(abs(a), abs(b))
    if m == 0.0:
        return 0.0
    return m * math.sqrt((a / m) ** 2 + (b / m) ** 2)


@numba.njit(cache=True)
def _robust_length3(a, b, c):
    m = max(abs(a), abs(b), abs(c))
    if m == 0.0:
        return 0.0
    return m * math.sqrt((a / m) ** 2 + (b / m) ** 2 + (c / m) ** 2)


@numba.njit(cache=True)
def _root_ellipse(r0, z0, z1, g):
    n0 = r0 * z0
    s0 = z1 - 1.0
    if g < 0.0:
        s1 = 0.0
    else:
        s1 = _robust_length2(n0, z1) - 1.0
    s = 0.0
    for _ in range(_MAX_ITER):
        s = 0.5 * (s0 + s1)
        if s == s0 or s == s1:
            break
        ratio0 = n0 / (s + r0)
        ratio1 = z1 / (s + 1.0)
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0
        if g > 0.0:
            s0 = s
        elif g < 0.0:
            s1 = s
        else:
            break
    return s


@numba.njit(cache=True)
def _root_ellipsoid(r0, r1, z0, z1, z2, g):
    n0 = r0 * z0
    n1 = r1 * z1
    s0 = z2 - 1.0
    if g < 0.0:
        s1 = 0.0
    else:
        s1 = _robust_length3(n0, n1, z2) - 1.0
    s = 0.0
    for _ in range(_MAX_ITER):
        s = 0.5 * (s0 + s1)
        if s == s0 or s == s1:
            break
        ratio0 = n0 / (s + r0)
        ratio1 = n1 / (s + r1)
        ratio2 = z2 / (s + 1.0)
        g = ratio0 * ratio0 + ratio1 * ratio1 + ratio2 * ratio2 - 1.0
        if g > 0.0:
            s0 = s
        elif g < 0.0:
            s1 = s
        else:
            break
    return s


@numba.njit(cache=True)
def _point_to_ellipse(e0, e1, y0, y1):
    # requires e0 >= e1 > 0 and y0, y1 >= 0
    if y1 > 0.0:
        if y0 > 0.0:
            z0 = y0 / e0
            z1 = y1 / e1
            g = z0 * z0 + z1 * z1 - 1.0
            if g != 0.0:
                r0 = (e0 / e1) ** 2
                sbar = _root_ellipse(r0, z0, z1, g)
                x0 = r0 * y0 / (sbar + r0)
                x1 = y1 / (sbar + 1.0)
                dist = math.sqrt((x0 - y0) ** 2 + (x1 - y1) ** 2)
            else:
                x0 = y0
                x1 = y1
                dist = 0.0
        else:
            x0 = 0.0
            x1 = e1
            dist = abs(y1 - e1)
    else:
        numer0 = e0 * y0
        denom0 = e0 * e0 - e1 * e1
        if numer0 < denom0:
            xde0 = numer0 / denom0
            x0 = e0 * xde0
            x1 = e1 * math.sqrt(1.0 - xde0 * xde0)
            dist = math.sqrt((x0 - y0) ** 2 + x1 * x1)
        else:
            x0 = e0
            x1 = 0.0
            dist = abs(y0 - e0)
    return dist, x0, x1


@numba.njit(cache=True)
def _point_to_ellipsoid(e0, e1, e2, y0, y1, y2):
    # requires e0 >= e1 >= e2 > 0 and y0, y1, y2 >= 0
    if y2 > 0.0:
        if y1 > 0.0:
            if y0 > 0.0:
                z0 = y0 / e0
                z1 = y1 / e1
                z2 = y2 / e2
                g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0
                if g != 0.0:
                    r0 = (e0 / e2) ** 2
                    r1 = (e1 / e2) ** 2
                    sbar = _root_ellipsoid(r0, r1, z0, z1, z2, g)
                    x0 = r0 * y0 / (sbar + r0)
                    x1 = r1 * y1 / (sbar + r1)
                    x2 = y2 / (sbar + 1.0)
                    dist = math.sqrt(
                        (x0 - y0) ** 2 + (x1 - y1) ** 2 + (x2 - y2) ** 2)
                else:
                    x0 = y0
                    x1 = y1
                    x2 = y2
                    dist = 0.0
            else:
                x0 = 0.0
                dist, x1, x2 = _point_to_ellipse(e1, e2, y1, y2)
        else:
            if y0 > 0.0:
                x1 = 0.0
                dist, x0, x2 = _point_to_ellipse(e0, e2, y0, y2)
            else:
                x0 = 0.0
                x1 = 0.0
                x2 = e2
                dist = abs(y2 - e2)
    else:
        denom0 = e0 * e0 - e2 * e2
        denom1 = e1 * e1 - e2 * e2
        numer0 = e0 * y0
        numer1 = e1 * y1
        computed = False
        x0 = 0.0
        x1 = 0.0
        x2 = 0.0
        dist = 0.0
        if numer0 < denom0 and numer1 < denom1:
            xde0 = numer0 / denom0
            xde1 = numer1 / denom1
            discr = 1.0 - xde0 * xde0 - xde1 * xde1
            if discr > 0.0:
                x0 = e0 * xde0
                x1 = e1 * xde1
                x2 = e2 * math.sqrt(discr)
                dist = math.sqrt((x0 - y0) ** 2 + (x1 - y1) ** 2 + x2 * x2)
                computed = True
        if not computed:
            x2 = 0.0
            dist, x0, x1 = _point_to_ellipse(e0, e1, y0, y1)
    return dist, x0, x1, x2


@numba.njit(numba.float64[::1](numba.float64[:, ::1], numba.float64[::1]),
            cache=True)
def ellipsoid_sdf(points, radii):
    """Signed distance of points to an ellipsoid centered at the origin.

    Parameters
    ----------
    points : array, shape (n_points, 3)
        Points in the ellipsoid frame.

    radii : array, shape (3,)
        Semi-axes along x, y, and z.

    Returns
    -------
    dist : array, shape (n_points,)
        Signed distances.
    """
    order = np.argsort(-radii)
    e0 = radii[order[0]]
    e1 = radii[order[1]]
    e2 = radii[order[2]]
    dist = np.empty(len(points))
    for i in range(len(points)):
        y0 = abs(points[i, order[0]])
        y1 = abs(points[i, order[1]])
        y2 = abs(points[i, order[2]])
        d, _, _, _ = _point_to_ellipsoid(e0, e1, e2, y0, y1, y2)
        if (y0 / e0) ** 2 + (y1 / e1) ** 2 + (y2 / e2) ** 2 < 1.0:
            d = -d
        dist[i] = d
    return dist
