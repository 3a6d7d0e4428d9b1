import numpy as np
from sheartac.contact import SensorGeometry
from sheartac.estimate import OracleEstimator, eval_estimator
from sheartac.dataset import CollectionConfig, collect_dataset
from sheartac.plotting import (
    plot_trajectories, resting_underlay, plot_comparison_grid,
    plot_estimator_errors, target_positions)
from sheartac.sensor import MarkerGridConfig
from sheartac.servo import TaskConfig, TrajectorySpec, run_tracking_task
from numpy.testing import assert_array_almost_equal, assert_array_equal


SMALL = dict(geometry=SensorGeometry(image_size=32),
             markers=MarkerGridConfig(n_markers=91, blob_sigma=0.3))


def _circle_log():
    spec = TrajectorySpec(name="circle", scale=10.0, duration=4.0)
    _, log = run_tracking_task(TaskConfig(trajectory=spec, **SMALL))
    return log


def test_plot_trajectories_is_reproducible(tmp_path):
    log = _circle_log()
    log_file = tmp_path / "circle.jsonl"
    log.save(log_file)
    plot_trajectories(log_file, tmp_path / "a.png")
    plot_trajectories(log_file, tmp_path / "b.png")
    a = (tmp_path / "a.png").read_bytes()
    assert a[:8] == b"\x89PNG\r\n\x1a\n"
    assert a == (tmp_path / "b.png").read_bytes()


def test_circle_target_is_closed():
    log = _circle_log()
    targets = target_positions(log)
    # the leader is back home after the last cycle
    assert_array_almost_equal(targets[-1], log.contact_offset.position)
    assert np.linalg.norm(targets[0] - targets[-1]) < 2.0


def test_resting_underlay():
    image = np.zeros((4, 4))
    resting = np.zeros((4, 4))
    resting[1, 1] = 0.6
    image[2, 2] = 0.5
    rgb = resting_underlay(image, resting)
    assert_array_equal(rgb[1, 1], [0.6, 0.0, 0.0])
    assert_array_equal(rgb[2, 2], [0.5, 0.5, 0.5])


def test_comparison_grid_and_estimator_errors(tmp_path):
    random_state = np.random.RandomState(0)
    columns = {"sim": random_state.rand(2, 8, 8),
               "real": random_state.rand(2, 8, 8)}
    plot_comparison_grid(columns, np.zeros((8, 8)), tmp_path / "grid.png",
                         labels=["edge", "surface"])
    assert (tmp_path / "grid.png").stat().st_size > 0

    config = CollectionConfig(
        n_train=3, n_val=2, geometry=SensorGeometry(image_size=32),
        markers=MarkerGridConfig(n_markers=91, blob_sigma=0.3))
    manifest = collect_dataset(config, tmp_path / "dataset")
    report = eval_estimator(OracleEstimator(label_dim=4), manifest)
    plot_estimator_errors({"oracle": report}, tmp_path / "errors.png")
    assert (tmp_path / "errors.png").stat().st_size > 0
