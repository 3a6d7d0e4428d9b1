"""Leader/follower tactile servoing: tracking and co-lifting."""
from ._trajectories import (
    TRAJECTORIES, TrajectorySpec, RoundedPolygon, leader_trajectory)
from ._control import ServoGains, ShearAnchor, servo_step
from ._error import TrackingError, tracking_error
from ._tasks import (
    TASKS, TaskConfig, TaskLog, task_objects, load_task_estimator,
    gravity_shear, move_sensor, run_tracking_task, run_colift_task,
    run_task, run_tasks)


__all__ = [
    "TRAJECTORIES", "TrajectorySpec", "RoundedPolygon", "leader_trajectory",
    "ServoGains", "ShearAnchor", "servo_step", "TrackingError",
    "tracking_error", "TASKS", "TaskConfig", "TaskLog", "task_objects",
    "load_task_estimator", "gravity_shear", "move_sensor",
    "run_tracking_task", "run_colift_task", "run_task", "run_tasks"]
