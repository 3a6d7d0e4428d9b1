import numpy as np
import pytest
from sheartac.contact import SensorGeometry
from sheartac.errors import ConfigurationError, ContactLostError, DatasetError
from sheartac.estimate import (
    GaussianPrediction, EstimatorConfig, EstimatorCheckpoint)
from sheartac.estimate._training import build_network
from sheartac.pose import Pose4
from sheartac.sensor import MarkerGridConfig
from sheartac.servo import (
    TRAJECTORIES, TrajectorySpec, RoundedPolygon, leader_trajectory,
    ServoGains, ShearAnchor, servo_step, tracking_error, TaskConfig, TaskLog,
    gravity_shear, move_sensor, run_tracking_task, run_colift_task,
    load_task_estimator)
from numpy.testing import assert_array_almost_equal
from pytest import approx


SMALL = dict(geometry=SensorGeometry(image_size=32),
             markers=MarkerGridConfig(n_markers=91, blob_sigma=0.3))


def _prediction(depth=1.5, sx=0.0, sy=0.0):
    return GaussianPrediction([depth, 0.0, sx, sy], np.ones(4))


def test_trajectories_start_at_home():
    home = Pose4(1.0, 2.0, 3.0, 30.0)
    for name in TRAJECTORIES:
        pose = leader_trajectory(TrajectorySpec(name=name, home=home), 0.0)
        assert_array_almost_equal(pose.as_array(), home.as_array(), decimal=9)


def test_closed_trajectories_return_home():
    for name in ("circle", "square", "loop", "wave", "star"):
        spec = TrajectorySpec(name=name, duration=10.0)
        pose = leader_trajectory(spec, spec.duration)
        assert_array_almost_equal(pose.as_array(), np.zeros(4), decimal=9)


def test_circle_quarter():
    spec = TrajectorySpec(name="circle", scale=30.0, duration=8.0)
    pose = leader_trajectory(spec, 2.0)
    assert pose.x == approx(30.0)
    assert pose.y == approx(30.0)
    assert pose.z == 0.0
    assert pose.yaw == 0.0


def test_spiral_rises():
    spec = TrajectorySpec(name="spiral", rise=10.0)
    assert leader_trajectory(spec, spec.duration).z == approx(10.0)
    assert leader_trajectory(spec, 0.5 * spec.duration).z == approx(5.0)


def test_square_is_tilted():
    spec = TrajectorySpec(name="square", tilt=20.0)
    for t in np.linspace(0.0, spec.duration, 17):
        pose = leader_trajectory(spec, t)
        assert pose.z == approx(np.tan(np.deg2rad(20.0)) * pose.y, abs=1e-9)


def test_loop_yaw_is_bounded():
    spec = TrajectorySpec(name="loop", yaw_amplitude=10.0)
    yaws = np.array([leader_trajectory(spec, t).yaw
                     for t in np.linspace(0.0, spec.duration, 101)])
    assert np.all(np.abs(yaws) <= 10.0 + 1e-9)
    assert np.max(np.abs(yaws)) > 5.0


def test_polygons_have_constant_speed():
    for name in ("square", "star"):
        spec = TrajectorySpec(name=name, scale=20.0)
        points = np.array([leader_trajectory(spec, t).position[:2]
                           for t in np.linspace(0.0, spec.duration, 401)])
        steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
        # chords are shorter than arcs on the fillets
        assert np.max(steps) == approx(np.median(steps), rel=1e-6)
        assert np.min(steps) > 0.9 * np.median(steps)


def test_rounded_square_length():
    polygon = RoundedPolygon([[0, 0], [10, 0], [10, 10], [0, 10]], 1.0)
    assert polygon.length == approx(4 * 8.0 + 2.0 * np.pi)
    assert_array_almost_equal(polygon.offset(1.0), np.zeros(2))
    with pytest.raises(ConfigurationError):
        RoundedPolygon([[0, 0], [1, 0], [1, 1], [0, 1]], 1.0)


def test_leader_trajectory_time_range():
    spec = TrajectorySpec(duration=5.0)
    with pytest.raises(ValueError):
        leader_trajectory(spec, -0.1)
    with pytest.raises(ValueError):
        leader_trajectory(spec, 5.1)
    with pytest.raises(ConfigurationError):
        TrajectorySpec(name="zigzag")
    with pytest.raises(ConfigurationError):
        TrajectorySpec(duration=0.0)
    assert TrajectorySpec(duration=5.0, sample_rate=10.0).n_steps == 50


def test_servo_step_equilibrium():
    delta = servo_step(_prediction(), ServoGains())
    assert_array_almost_equal(delta.as_array(), np.zeros(4))


def test_servo_step_is_proportional():
    delta = servo_step(_prediction(sx=2.0), ServoGains(k_shear_xy=0.5))
    assert_array_almost_equal(delta.as_array(), [1.0, 0.0, 0.0, 0.0])
    delta = servo_step(_prediction(depth=2.5), ServoGains(k_depth=0.5))
    assert delta.z == approx(0.5)


def test_servo_step_is_clamped():
    delta = servo_step(_prediction(sx=10.0, sy=-10.0),
                       ServoGains(step_limit=2.0))
    assert delta.x == 2.0
    assert delta.y == -2.0


def test_servo_step_uses_six_components():
    prediction = GaussianPrediction([1.5, 0.0, 0.0, 0.0, 1.0, 4.0],
                                    np.ones(6))
    delta = servo_step(prediction, ServoGains())
    assert delta.z == approx(0.8)
    assert delta.yaw == approx(2.0)


def test_servo_gains_validation():
    with pytest.raises(ConfigurationError):
        ServoGains(k_shear_xy=2.0)
    with pytest.raises(ConfigurationError):
        ServoGains(k_depth=0.0)
    with pytest.raises(ConfigurationError):
        ServoGains(step_limit=0.0)
    assert ServoGains(k_shear_xy=0.0).k_shear_xy == 0.0


def test_shear_anchor_resets_on_recontact():
    anchor = ShearAnchor()
    assert anchor.update(Pose4(), True).as_array() == approx(np.zeros(4))
    shear = anchor.update(Pose4(x=-1.0), True)
    assert shear.sx == approx(1.0)
    assert anchor.update(Pose4(x=-5.0), False) is None
    assert anchor.update(Pose4(x=-5.0), True).sx == approx(0.0)


def test_tracking_error_identical_logs():
    poses = [Pose4(x=float(i)) for i in range(5)]
    error = tracking_error(poses, poses, Pose4())
    assert error.mean == 0.0
    assert error.std == 0.0
    assert len(error.series) == 5


def test_tracking_error_constant_offset():
    leader = [Pose4(x=float(i), yaw=90.0) for i in range(5)]
    follower = [Pose4(x=float(i), y=1.0) for i in range(5)]
    error = tracking_error(leader, follower, Pose4(x=1.0))
    assert error.mean == approx(0.0, abs=1e-12)
    error = tracking_error(leader, follower, Pose4())
    assert error.mean == approx(1.0)
    assert error.std == approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        tracking_error(leader, follower[:3], Pose4())


def test_gravity_shear_and_sensor_motion():
    assert_array_almost_equal(
        gravity_shear(0.5, 0.0, "horizontal").as_array(), [0.0, 0.5, 0.0, 0.0])
    pose = move_sensor(Pose4(), Pose4(z=1.0), "horizontal")
    assert_array_almost_equal(pose.as_array(), [0.0, 1.0, 0.0, 0.0])
    pose = move_sensor(Pose4(yaw=90.0), Pose4(x=1.0, yaw=5.0), "vertical")
    assert_array_almost_equal(pose.as_array(), [0.0, 1.0, 0.0, 95.0])


def test_task_config_validation():
    with pytest.raises(ConfigurationError):
        TaskConfig(task="tracking", gravity_shear_bias=0.5)
    with pytest.raises(ConfigurationError):
        TaskConfig(task="juggling")
    with pytest.raises(ConfigurationError):
        TaskConfig(shape="teapot")
    with pytest.raises(ConfigurationError):
        TaskConfig(initial_depth=10.0)
    assert TaskConfig(task="colift").mount == "horizontal"
    assert TaskConfig(task="colift", shape="egg").shape.kind == "ellipsoid"


def test_task_config_dict_repr():
    config = TaskConfig(task="colift", shape="egg", gravity_shear_bias=0.3,
                        trajectory=TrajectorySpec(name="star"), **SMALL)
    restored = TaskConfig.from_dict(config.to_dict())
    assert restored.to_dict() == config.to_dict()


def test_static_leader_holds_position():
    config = TaskConfig(trajectory=TrajectorySpec(name="static", duration=2.0),
                        **SMALL)
    error, log = run_tracking_task(config)
    assert len(error.series) == 20
    assert error.mean < 0.1


def test_circle_with_oracle_lags_one_step(tmp_path):
    spec = TrajectorySpec(name="circle", scale=10.0, duration=10.0)
    error, log = run_tracking_task(TaskConfig(trajectory=spec, **SMALL))
    step = 2.0 * np.pi * spec.scale / spec.n_steps
    assert len(error.series) == spec.n_steps
    assert error.mean <= 0.5 * step

    filename = tmp_path / "circle.jsonl"
    log.save(filename)
    loaded = TaskLog.load(filename)
    replayed = loaded.tracking_error()
    assert replayed.mean == log.header["error"]["mean"]
    assert replayed.std == log.header["error"]["std"]
    assert loaded.cycles[3]["error"] == log.cycles[3]["error"]


def test_static_depth_error_contracts():
    config = TaskConfig(
        trajectory=TrajectorySpec(name="static", duration=2.0),
        initial_depth=2.5, **SMALL)
    _, log = run_tracking_task(config)
    gains = config.gains
    z0 = log.contact_offset.z
    radius = config.geometry.tip_radius
    equilibrium = (gains.k_depth * (radius - gains.depth_reference)
                   + gains.k_shear_xy * z0) / (gains.k_depth + gains.k_shear_xy)
    distances = np.abs(log.follower_poses()[:, 2] - equilibrium)
    previous = abs(z0 - equilibrium)
    for distance in distances:
        if previous < 1e-3:
            break
        assert distance < previous
        previous = distance
    assert distances[-1] < 1e-3
    assert_array_almost_equal(log.follower_poses()[:, :2], 0.0)


def test_contact_is_lost_without_shear_feedback():
    spec = TrajectorySpec(name="circle", scale=30.0, duration=10.0)
    config = TaskConfig(trajectory=spec, gains=ServoGains(k_shear_xy=0.0),
                        **SMALL)
    with pytest.raises(ContactLostError) as excinfo:
        run_tracking_task(config)
    assert excinfo.value.step < spec.n_steps // 4


def test_colift_without_bias_holds():
    config = TaskConfig(
        task="colift", trajectory=TrajectorySpec(name="static", duration=2.0),
        **SMALL)
    error, log = run_colift_task(config)
    assert error.mean < 0.1
    assert log.header["mount"] == "horizontal"


def test_colift_gravity_bias_offset():
    bias = 0.5
    for k in (0.8, 0.4):
        config = TaskConfig(
            task="colift",
            trajectory=TrajectorySpec(name="static", duration=3.0),
            gains=ServoGains(k_shear_xy=k), gravity_shear_bias=bias, **SMALL)
        error, log = run_colift_task(config)
        # offset after n actions is bias * (1 - (1 - k) ** n)
        assert error.series[0] == approx(k * bias, rel=1e-3)
        assert error.series[1] == approx(
            bias * (1.0 - (1.0 - k) ** 2), rel=1e-3)
        assert error.series[-1] == approx(bias, rel=1e-3)
        # the object drags the follower downwards
        assert log.follower_poses()[-1, 2] == approx(-bias, rel=1e-3)


def test_colift_wave_keeps_contact():
    config = TaskConfig(
        task="colift",
        trajectory=TrajectorySpec(name="wave", scale=10.0, duration=10.0),
        gravity_shear_bias=0.2, **SMALL)
    error, _ = run_colift_task(config)
    assert len(error.series) == 100
    assert error.mean < 2.5
    assert np.isfinite(error.mean)


def test_task_kind_mismatch():
    with pytest.raises(ConfigurationError):
        run_colift_task(TaskConfig(**SMALL))
    with pytest.raises(ConfigurationError):
        run_tracking_task(TaskConfig(task="colift", **SMALL))


def test_estimator_image_size_mismatch(tmp_path):
    config = EstimatorConfig(image_size=64, conv_channels=(4, 8, 16),
                             hidden_width=8)
    filename = tmp_path / "estimator.pt"
    EstimatorCheckpoint(config, build_network(config).state_dict(),
                        np.zeros(4), np.ones(4)).save(filename)
    with pytest.raises(ConfigurationError):
        load_task_estimator(TaskConfig(estimator=str(filename), **SMALL))


def test_task_log_rejects_other_files(tmp_path):
    filename = tmp_path / "log.jsonl"
    filename.write_text('{"type": "cycle"}\n')
    with pytest.raises(DatasetError):
        TaskLog.load(filename)
