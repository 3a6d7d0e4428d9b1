from dataclasses import dataclass, asdict

import numpy as np

from ..errors import ConfigurationError
from ..pose import Pose4, contact_shear


@dataclass(frozen=True)
class ServoGains:
    """Gains of the shear-nulling proportional controller.

    Parameters
    ----------
    k_shear_xy : float, optional (default: 0.8)
        Fraction of the translational shear corrected per cycle. Zero
        disables shear feedback.

    k_shear_yaw : float, optional (default: 0.5)
        Fraction of the rotational shear corrected per cycle.

    k_depth : float, optional (default: 0.5)
        Fraction of the depth error corrected per cycle.

    depth_reference : float, optional (default: 1.5)
        Desired indentation in mm.

    step_limit : float, optional (default: 2)
        Maximum translation per cycle and axis in mm.
    """
    k_shear_xy: float = 0.8
    k_shear_yaw: float = 0.5
    k_depth: float = 0.5
    depth_reference: float = 1.5
    step_limit: float = 2.0

    def __post_init__(self):
        for name in ("k_shear_xy", "k_shear_yaw", "k_depth"):
            if not 0.0 <= getattr(self, name) < 2.0:
                raise ConfigurationError(
                    "%s must lie in [0, 2), got %r"
                    % (name, getattr(self, name)))
        if not self.k_depth > 0.0:
            raise ConfigurationError("k_depth must be positive")
        if not self.depth_reference > 0.0:
            raise ConfigurationError("depth_reference must be positive")
        if not self.step_limit > 0.0:
            raise ConfigurationError("step_limit must be positive")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid servo gains: %s" % e)


def servo_step(prediction, gains):
    """Sensor motion that moves the contact back to the sensor centre.

    Moving the sensor in the direction of the measured shear re-centers the
    contact and drives the shear towards zero. Components that the
    estimator does not provide count as zero.

    Parameters
    ----------
    prediction : GaussianPrediction
        Estimate from the current tactile image.

    gains : ServoGains
        Controller gains.

    Returns
    -------
    delta : Pose4
        Translation in mm in the sensor frame (+z points away from the
        object) and rotation about the world z-axis in degrees.
    """
    depth_error = prediction.component("pose_depth") - gains.depth_reference
    translation = np.array([
        gains.k_shear_xy * prediction.component("shear_x"),
        gains.k_shear_xy * prediction.component("shear_y"),
        gains.k_depth * depth_error
        + gains.k_shear_xy * prediction.component("shear_z")])
    translation = np.clip(translation, -gains.step_limit, gains.step_limit)
    return Pose4(translation[0], translation[1], translation[2],
                 gains.k_shear_yaw * prediction.component("shear_yaw"))


class ShearAnchor:
    """Tracks the pose at first contact.

    The anchor is set when contact is made and forgotten when contact is
    lost, so that the shear restarts from zero on re-contact.
    """
    def __init__(self):
        self.anchor = None

    def update(self, pose, in_contact):
        """Shear felt at a pose.

        Parameters
        ----------
        pose : Pose4
            Current pose of the sensor relative to the object.

        in_contact : bool
            Is the sensor in contact?

        Returns
        -------
        shear : ShearVector or None
            Shear in the tool frame, None without contact.
        """
        if not in_contact:
            self.anchor = None
            return None
        if self.anchor is None:
            self.anchor = pose
        return contact_shear(self.anchor, pose)
