import numpy as np
import pytest
from sheartac.pose import (
    Pose4, ShearVector, pose_to_transform, compose_poses, invert_pose,
    relative_pose, compute_shear_pose, contact_shear, shear_to_sensor_frame,
    mount_rotation)
from numpy.testing import assert_array_almost_equal
from pytest import approx


def _random_pose(random_state):
    return Pose4(*(20.0 * random_state.randn(3)),
                 yaw=random_state.uniform(-180.0, 180.0))


def test_pose_normalizes_yaw():
    assert Pose4(yaw=270.0).yaw == approx(-90.0)
    assert Pose4(yaw=180.0).yaw == -180.0


def test_pose_rejects_non_finite():
    with pytest.raises(ValueError):
        Pose4(x=np.nan)
    with pytest.raises(ValueError):
        ShearVector(syaw=np.inf)


def test_pose_to_transform_vertical():
    sensor2origin = pose_to_transform(Pose4(1.0, 2.0, 3.0, 90.0))
    assert_array_almost_equal(sensor2origin[:3, 3], [1.0, 2.0, 3.0])
    assert_array_almost_equal(sensor2origin[:3, 0], [0.0, 1.0, 0.0])
    assert_array_almost_equal(sensor2origin[:3, 2], [0.0, 0.0, 1.0])


def test_pose_to_transform_horizontal():
    sensor2origin = pose_to_transform(Pose4(), "horizontal")
    # tip axis -z of the sensor points along world -y
    assert_array_almost_equal(-sensor2origin[:3, 2], [0.0, -1.0, 0.0])
    assert_array_almost_equal(sensor2origin[:3, 1], [0.0, 0.0, -1.0])


def test_unknown_mount():
    with pytest.raises(ValueError):
        mount_rotation("diagonal")


def test_compose_invert():
    random_state = np.random.RandomState(42)
    for _ in range(10):
        a = _random_pose(random_state)
        identity = compose_poses(a, invert_pose(a))
        assert_array_almost_equal(identity.as_array(), np.zeros(4))


def test_compose_matches_transforms():
    random_state = np.random.RandomState(43)
    for _ in range(10):
        a = _random_pose(random_state)
        b = _random_pose(random_state)
        assert_array_almost_equal(
            pose_to_transform(compose_poses(a, b)),
            np.dot(pose_to_transform(a), pose_to_transform(b)))


def test_relative_pose():
    random_state = np.random.RandomState(44)
    for _ in range(10):
        a = _random_pose(random_state)
        b = _random_pose(random_state)
        assert_array_almost_equal(
            compose_poses(a, relative_pose(a, b)).as_array(), b.as_array())


def test_shear_pose_identity():
    random_state = np.random.RandomState(45)
    for _ in range(10):
        a = _random_pose(random_state)
        assert_array_almost_equal(
            compute_shear_pose(a, a).as_array(), np.zeros(4))


def test_shear_pose_examples():
    shear = compute_shear_pose(Pose4(0, 0, 10, 0), Pose4(2, -1, 10, 5))
    assert_array_almost_equal(shear.as_array(), [2, -1, 0, 5])

    shear = compute_shear_pose(Pose4(0, 0, 10, 90), Pose4(1, 0, 10, 90))
    assert_array_almost_equal(shear.as_array(), [0, -1, 0, 0])


def test_shear_pose_equivariance():
    random_state = np.random.RandomState(46)
    for _ in range(20):
        anchor = _random_pose(random_state)
        current = _random_pose(random_state)
        motion = _random_pose(random_state)
        shear = compute_shear_pose(anchor, current).as_array()
        moved_shear = compute_shear_pose(
            compose_poses(motion, anchor),
            compose_poses(motion, current)).as_array()
        assert np.max(np.abs(shear - moved_shear)) < 1e-9


def test_contact_shear_sign():
    anchor = Pose4(0.0, 0.0, 9.0, 0.0)
    # the sensor moved down by 0.5 mm and to the left by 1 mm
    current = Pose4(-1.0, 0.0, 8.5, 0.0)
    shear = contact_shear(anchor, current)
    assert_array_almost_equal(shear.as_array(), [1.0, 0.0, 0.5, 0.0])


def test_shear_to_sensor_frame():
    shear = ShearVector(1.0, 2.0, 3.0, 4.0)
    assert_array_almost_equal(
        shear_to_sensor_frame(shear, "vertical").as_array(), [1, 2, 3, 4])
    assert_array_almost_equal(
        shear_to_sensor_frame(shear, "horizontal").as_array(), [1, -3, 2, 4])


def test_shear_vector_addition():
    s = ShearVector(1, 2, 3, 170) + ShearVector(1, 1, 1, 20)
    assert_array_almost_equal(s.as_array(), [2, 3, 4, -170])
