"""Exceptions raised by sheartac."""


class SheartacError(Exception):
    """Base class of all errors raised by this package."""


class ConfigurationError(SheartacError, ValueError):
    """Invalid or inconsistent configuration."""


class OverPenetrationError(SheartacError, ValueError):
    """The sensor centre lies deeper inside the object than the tip radius.

    Parameters
    ----------
    signed_distance : float
        Signed distance of the tip centre to the object in mm.
    """
    def __init__(self, signed_distance):
        super(OverPenetrationError, self).__init__(
            "over-penetration: tip centre is %.3f mm inside the object"
            % -signed_distance)
        self.signed_distance = signed_distance


class ContactSamplingError(SheartacError, RuntimeError):
    """Could not sample a configuration that keeps the sensor in contact."""


class DatasetError(SheartacError, IOError):
    """A dataset record could not be loaded or failed validation.

    Parameters
    ----------
    message : str
        Description of the problem.

    record_index : int, optional (default: None)
        Position of the failing record in the manifest.
    """
    def __init__(self, message, record_index=None):
        if record_index is not None:
            message = "record %d: %s" % (record_index, message)
        super(DatasetError, self).__init__(message)
        self.record_index = record_index


class TrainingDivergedError(SheartacError, FloatingPointError):
    """A training loss became NaN or infinite."""


class ContactLostError(SheartacError, RuntimeError):
    """The follower lost contact with the object during a servo task.

    Parameters
    ----------
    step : int
        Index of the control cycle with an all-zero depth frame.
    """
    def __init__(self, step):
        super(ContactLostError, self).__init__(
            "contact lost at step %d" % step)
        self.step = step
