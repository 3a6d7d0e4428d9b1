"""Wall-clock timing of pipeline stages."""
import contextlib
import logging
import time


logger = logging.getLogger(__name__)


class Timer:
    """Collect timing information from pipeline stages."""
    def __init__(self):
        self._start_time = {}
        self.total_time_ = {}

    def start(self, name):
        self._start_time[name] = time.perf_counter()

    def stop(self, name):
        stop_time = time.perf_counter()
        if name not in self._start_time:
            raise KeyError("Timer '%s' has not been started" % name)
        return stop_time - self._start_time.pop(name)

    def stop_and_add_to_total(self, name):
        duration = self.stop(name)
        current_total = self.total_time_.get(name, 0.0)
        self.total_time_[name] = current_total + duration
        return duration

    @contextlib.contextmanager
    def measure(self, name):
        """Time a block and add its duration to the total of a stage.

        Parameters
        ----------
        name : str
            Name of the stage.
        """
        self.start(name)
        try:
            yield self
        finally:
            duration = self.stop_and_add_to_total(name)
            logger.info("%s took %.2f s", name, duration)
