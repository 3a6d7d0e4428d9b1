"""Signed distance functions of primitive shapes.

All functions take points expressed in the local frame of the shape and
return signed distances in the same unit: negative inside, positive outside
and zero on the boundary. The functions are exact, hence 1-Lipschitz.

Use :class:`sheartac.shapes.ObjectShape` to evaluate signed distances of
placed objects in the world frame.
"""
from ._plane import half_space_sdf
from ._box import box_sdf
from ._ellipsoid import ellipsoid_sdf, point_to_ellipsoid


__all__ = [
    "half_space_sdf",
    "box_sdf",
    "ellipsoid_sdf",
    "point_to_ellipsoid",
]
