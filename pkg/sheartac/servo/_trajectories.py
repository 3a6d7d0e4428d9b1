import functools
from dataclasses import dataclass, asdict, field

import numpy as np

from ..errors import ConfigurationError
from ..pose import Pose4, compose_poses


TRAJECTORIES = ("static", "circle", "square", "spiral", "loop", "wave",
                "star")


@dataclass(frozen=True)
class TrajectorySpec:
    """Path of the leader.

    All paths are offsets from the home pose, so that every trajectory
    starts there.

    Parameters
    ----------
    name : str, optional (default: 'circle')
        One of :data:`TRAJECTORIES`.

    scale : float, optional (default: 20)
        Size of the path in mm: radius of circular paths, edge length of the
        square, diameter of the star.

    duration : float, optional (default: 20)
        Duration in seconds.

    sample_rate : float, optional (default: 10)
        Control cycles per second.

    tilt : float, optional (default: 20)
        Slope of the square in degrees.

    rise : float, optional (default: 10)
        Height gain of the spiral in mm.

    wave_height : float, optional (default: 5)
        Amplitude of the vertical oscillation of the wave in mm.

    wave_count : int, optional (default: 4)
        Oscillations of the wave per revolution.

    yaw_amplitude : float, optional (default: 10)
        Maximum yaw of the loop in degrees.

    home : Pose4, optional (default: identity)
        Pose of the leader at t = 0.
    """
    name: str = "circle"
    scale: float = 20.0
    duration: float = 20.0
    sample_rate: float = 10.0
    tilt: float = 20.0
    rise: float = 10.0
    wave_height: float = 5.0
    wave_count: int = 4
    yaw_amplitude: float = 10.0
    home: Pose4 = field(default_factory=Pose4)

    def __post_init__(self):
        if self.name not in TRAJECTORIES:
            raise ConfigurationError(
                "Unknown trajectory '%s', expected one of %s"
                % (self.name, TRAJECTORIES))
        for name in ("scale", "duration", "sample_rate"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError("%s must be positive" % name)
        if isinstance(self.home, (list, tuple)):
            object.__setattr__(self, "home", Pose4(*self.home))

    @property
    def n_steps(self):
        """Number of control cycles."""
        return int(round(self.duration * self.sample_rate))

    @property
    def times(self):
        """Times of the control cycles, the leader moves before each cycle."""
        return np.minimum(
            np.arange(1, self.n_steps + 1) / self.sample_rate, self.duration)

    def to_dict(self):
        config = asdict(self)
        config["home"] = self.home.to_list()
        return config

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid trajectory: %s" % e)


class RoundedPolygon:
    """Closed polygon with circular fillets traversed at constant speed.

    Parameters
    ----------
    vertices : array, shape (n_vertices, 2)
        Corners in counter-clockwise or clockwise order.

    fillet_radius : float
        Radius of the arcs that replace the corners.
    """
    def __init__(self, vertices, fillet_radius):
        vertices = np.asarray(vertices, dtype=np.float64)
        n_vertices = len(vertices)
        directions = np.roll(vertices, -1, axis=0) - vertices
        lengths = np.linalg.norm(directions, axis=1)
        directions /= lengths[:, np.newaxis]

        # corner i joins edge i - 1 and edge i
        arcs = []
        for i in range(n_vertices):
            d_in = directions[i - 1]
            d_out = directions[i]
            turn = np.arctan2(d_in[0] * d_out[1] - d_in[1] * d_out[0],
                              np.dot(d_in, d_out))
            cut = fillet_radius * np.tan(0.5 * abs(turn))
            start = vertices[i] - cut * d_in
            normal = np.sign(turn) * np.array([-d_in[1], d_in[0]])
            arcs.append((cut, start, start + fillet_radius * normal, turn))

        # pieces: edge 0, corner 1, edge 1, ..., corner 0
        self._pieces = []
        for i in range(n_vertices):
            cut_start = arcs[i][0]
            cut_end = arcs[(i + 1) % n_vertices][0]
            segment_length = lengths[i] - cut_start - cut_end
            if segment_length < 0.0:
                raise ConfigurationError(
                    "Fillet radius %g is too large for an edge of %g mm"
                    % (fillet_radius, lengths[i]))
            self._pieces.append((
                "line", segment_length,
                vertices[i] + cut_start * directions[i], directions[i]))
            _, start, center, turn = arcs[(i + 1) % n_vertices]
            self._pieces.append(
                ("arc", fillet_radius * abs(turn), start, center, turn))
        self._offsets = np.cumsum([0.0] + [p[1] for p in self._pieces])
        self.length = self._offsets[-1]

    def point(self, s):
        """Point at an arc length.

        Parameters
        ----------
        s : float
            Arc length from the start of the first edge, wraps around.

        Returns
        -------
        p : array, shape (2,)
            Point on the path.
        """
        s = np.mod(s, self.length)
        index = min(np.searchsorted(self._offsets, s, side="right") - 1,
                    len(self._pieces) - 1)
        piece = self._pieces[index]
        local = s - self._offsets[index]
        if piece[0] == "line":
            return piece[2] + local * piece[3]
        _, length, start, center, turn = piece
        angle = turn * local / length if length > 0.0 else 0.0
        cos = np.cos(angle)
        sin = np.sin(angle)
        r = start - center
        return center + np.array(
            [cos * r[0] - sin * r[1], sin * r[0] + cos * r[1]])

    def offset(self, fraction):
        """Displacement from the middle of the first edge.

        Parameters
        ----------
        fraction : float
            Travelled fraction of the perimeter.

        Returns
        -------
        offset : array, shape (2,)
            Displacement, zero for fractions 0 and 1.
        """
        s0 = 0.5 * self._pieces[0][1]
        return self.point(s0 + fraction * self.length) - self.point(s0)


@functools.lru_cache(maxsize=16)
def _square(scale):
    vertices = scale * np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0],
                                 [0.0, 1.0]])
    return RoundedPolygon(vertices, 0.1 * scale)


@functools.lru_cache(maxsize=16)
def _star(scale, n_points=5):
    outer = 0.5 * scale
    inner = outer * np.sin(np.deg2rad(18.0)) / np.sin(np.deg2rad(54.0))
    angles = 0.5 * np.pi + np.arange(2 * n_points) * np.pi / n_points
    radii = np.where(np.arange(2 * n_points) % 2 == 0, outer, inner)
    vertices = np.column_stack((radii * np.cos(angles),
                                radii * np.sin(angles)))
    return RoundedPolygon(vertices, 0.05 * scale)


def _loop_yaw(theta, amplitude):
    # sine of the tangent direction relative to the initial tangent
    tangent = np.array([np.cos(theta), np.cos(2.0 * theta)])
    initial = np.array([1.0, 1.0])
    cross = initial[0] * tangent[1] - initial[1] * tangent[0]
    return amplitude * cross / (np.linalg.norm(initial)
                                * np.linalg.norm(tangent))


def leader_trajectory(spec, t):
    """Pose of the leader at a time.

    Parameters
    ----------
    spec : TrajectorySpec
        Trajectory.

    t : float
        Time in seconds, 0 <= t <= duration.

    Returns
    -------
    pose : Pose4
        Pose of the leader, the home pose at t = 0.

    Raises
    ------
    ValueError
        If t lies outside of [0, duration].
    """
    if not 0.0 <= t <= spec.duration:
        raise ValueError("Time %g is outside of [0, %g]" % (t, spec.duration))
    fraction = t / spec.duration
    theta = 2.0 * np.pi * fraction
    r = spec.scale
    x = y = z = yaw = 0.0
    if spec.name in ("circle", "spiral", "wave"):
        x = r * np.sin(theta)
        y = r * (1.0 - np.cos(theta))
        if spec.name == "spiral":
            z = spec.rise * fraction
        elif spec.name == "wave":
            z = spec.wave_height * np.sin(spec.wave_count * theta)
    elif spec.name == "loop":
        x = r * np.sin(theta)
        y = 0.5 * r * np.sin(2.0 * theta)
        yaw = _loop_yaw(theta, spec.yaw_amplitude)
    elif spec.name == "square":
        x, y = _square(float(r)).offset(fraction)
        z = np.tan(np.deg2rad(spec.tilt)) * y
    elif spec.name == "star":
        x, y = _star(float(r)).offset(fraction)
    return compose_poses(spec.home, Pose4(x, y, z, yaw))
