import numpy as np
import pytest
from sheartac.errors import ConfigurationError
from sheartac.pose import Pose4
from sheartac.shapes import HalfSpace, Box, Ellipsoid, shape_from_dict
from numpy.testing import assert_array_almost_equal
from pytest import approx


def test_half_space_world_frame():
    plane = HalfSpace(Pose4(z=-1.0))
    assert_array_almost_equal(plane.sdf([[0.0, 0.0, 5.0], [3.0, 4.0, -2.0]]),
                              [6.0, -1.0])


def test_box_pose():
    box = Box(Pose4(10.0, 0.0, 0.0, 90.0), size=(2.0, 4.0, 6.0))
    # local y is world -x after a rotation of 90 degrees
    assert approx(box.sdf([10.0, 1.5, 0.0])[0]) == 0.5
    assert approx(box.sdf([7.0, 0.0, 0.0])[0]) == 1.0


def test_unit_sphere():
    sphere = Ellipsoid(radii=(1.0, 1.0, 1.0))
    assert approx(sphere.sdf([2.0, 0.0, 0.0])[0]) == 1.0


def test_dimensions_must_be_positive():
    with pytest.raises(ConfigurationError):
        Box(size=(1.0, 0.0, 1.0))
    with pytest.raises(ConfigurationError):
        Ellipsoid(radii=(1.0, -1.0, 1.0))
    with pytest.raises(ConfigurationError):
        Ellipsoid(radii=(1.0, 1.0))


def test_unknown_kind():
    with pytest.raises(ConfigurationError):
        shape_from_dict({"kind": "torus"})
    with pytest.raises(ConfigurationError):
        shape_from_dict({"kind": "box", "radius": 3.0})


def test_dict_round_trip():
    box = Box(Pose4(1.0, 2.0, 3.0, 45.0), size=(1.0, 2.0, 3.0))
    other = shape_from_dict(box.to_dict())
    assert isinstance(other, Box)
    assert_array_almost_equal(other.size, box.size)
    assert other.pose == box.pose


def test_moved_with_carrier():
    box = Box(Pose4(z=-10.0), size=(30.0, 30.0, 20.0))
    moved = box.moved(Pose4(5.0, 0.0, 0.0, 90.0))
    assert approx(moved.sdf([5.0, 0.0, 0.0])[0]) == 0.0
    assert approx(moved.sdf([5.0, 0.0, 3.0])[0]) == 3.0


def test_contact_sites():
    box = Box(Pose4(0.0, 0.0, 0.0, 30.0), size=(40.0, 40.0, 40.0))
    site, edge_yaw = box.contact_site("edge", offset=(1.0, 5.0))
    assert approx(box.sdf(site)[0], abs=1e-12) == 0.0
    assert approx(edge_yaw) == 30.0
    site, edge_yaw = box.contact_site("surface")
    assert_array_almost_equal(site, [0.0, 0.0, 20.0])
    assert edge_yaw == 0.0

    egg = Ellipsoid(radii=(20.0, 20.0, 30.0))
    site, _ = egg.contact_site("surface", offset=(3.0, 1.0))
    assert approx(egg.sdf(site)[0], abs=1e-9) == 0.0
    # offsets beyond the footprint still give a point on the upper half
    site, _ = egg.contact_site("surface", offset=(25.0, 0.0))
    assert approx(egg.sdf(site)[0], abs=1e-9) == 0.0
    assert 0.0 < site[0] < 20.0
    assert site[2] > 0.0
    assert_array_almost_equal(egg.contact_site("surface")[0], [0.0, 0.0, 30.0])

    with pytest.raises(ConfigurationError):
        HalfSpace().contact_site("edge")
