from dataclasses import dataclass

import numpy as np

from ..pose import Pose4
from ..utils import rotation_z


@dataclass
class TrackingError:
    """Distance between the follower and the leader-carried target.

    Parameters
    ----------
    mean : float
        Mean distance in mm.

    std : float
        Standard deviation of the distance in mm.

    series : array, shape (n_steps,)
        Distance per control cycle in mm.
    """
    mean: float
    std: float
    series: np.ndarray

    def to_dict(self):
        return {"mean": self.mean, "std": self.std,
                "series": self.series.tolist()}

    def __str__(self):
        return "error=%.2f±%.2f" % (self.mean, self.std)


def _pose_array(poses):
    if len(poses) > 0 and isinstance(poses[0], Pose4):
        return np.array([p.as_array() for p in poses])
    return np.asarray(poses, dtype=np.float64).reshape(-1, 4)


def tracking_error(leader_log, follower_log, contact_offset):
    """Mean and standard deviation of the tracking distance.

    Parameters
    ----------
    leader_log : list of Pose4 or array, shape (n_steps, 4)
        Poses of the leader.

    follower_log : list of Pose4 or array, shape (n_steps, 4)
        Poses of the follower's sensor.

    contact_offset : Pose4
        Target pose of the follower in the leader frame.

    Returns
    -------
    error : TrackingError
        Per-step Euclidean distances between the follower position and the
        target position.

    Raises
    ------
    ValueError
        If the logs have different lengths.
    """
    leader = _pose_array(leader_log)
    follower = _pose_array(follower_log)
    if len(leader) != len(follower):
        raise ValueError("Leader log has %d entries, follower log %d"
                         % (len(leader), len(follower)))
    if len(leader) == 0:
        return TrackingError(0.0, 0.0, np.zeros(0))
    offset = contact_offset.position
    targets = leader[:, :3] + np.array(
        [np.dot(rotation_z(yaw), offset) for yaw in leader[:, 3]])
    series = np.linalg.norm(follower[:, :3] - targets, axis=1)
    return TrackingError(float(np.mean(series)), float(np.std(series)),
                         series)
