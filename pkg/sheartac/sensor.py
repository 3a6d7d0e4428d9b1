"""Tactile image models.

Two image domains are produced from a :class:`~sheartac.contact.DepthImage`:

* simulated images are the normalized depth and do not contain shear,
* synthetic real images show a grid of markers that are displaced by the
  indentation and dragged by the shear of the contact, similar to the pins
  of a marker-based optical tactile sensor.
"""
import logging
from dataclasses import dataclass, asdict

import cv2
import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates
from scipy.spatial.distance import pdist

from .errors import ConfigurationError, DatasetError


logger = logging.getLogger(__name__)


DOMAINS = ("sim", "real_synthetic", "generated")
BLOB_AMPLITUDE = 0.6


class TactileImage:
    """Grayscale tactile image.

    Parameters
    ----------
    values : array, shape (H, W)
        Pixel values in [0, 1].

    domain : str
        One of 'sim', 'real_synthetic', or 'generated'.
    """
    def __init__(self, values, domain):
        if domain not in DOMAINS:
            raise ValueError("Unknown image domain '%s', expected one of %s"
                             % (domain, DOMAINS))
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("Tactile image must be 2D, got shape %s"
                             % (values.shape,))
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise ValueError("Tactile image values must lie in [0, 1]")
        self.values = values
        self.domain = domain

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __repr__(self):
        return "TactileImage(shape=%s, domain=%r)" % (self.shape, self.domain)


def _centered_hexagonal_rings(n_markers):
    rings = int(round((-3.0 + np.sqrt(9.0 + 12.0 * (n_markers - 1))) / 6.0))
    if 3 * rings * (rings + 1) + 1 != n_markers:
        raise ConfigurationError(
            "Number of markers must be a centred hexagonal number "
            "(1, 7, 19, ..., 331), got %d" % n_markers)
    return rings


class MarkerGrid:
    """Reference positions of the markers.

    Parameters
    ----------
    positions : array, shape (n_markers, 2)
        Marker centres in the sensor plane in mm.

    blob_sigma : float
        Standard deviation of the marker blobs in mm.

    aperture : float
        Edge length of the sensing aperture in mm.
    """
    def __init__(self, positions, blob_sigma, aperture):
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        if not blob_sigma > 0.0:
            raise ConfigurationError("blob_sigma must be positive")
        if np.any(np.abs(positions) > 0.5 * aperture):
            raise ConfigurationError(
                "All markers must lie inside the sensing aperture")
        if len(positions) > 1 and np.min(pdist(positions)) <= 2.0 * blob_sigma:
            raise ConfigurationError(
                "Marker spacing must exceed twice the blob sigma %g mm"
                % blob_sigma)
        self.positions = positions
        self.positions.setflags(write=False)
        self.blob_sigma = float(blob_sigma)
        self.aperture = float(aperture)

    @property
    def n_markers(self):
        return len(self.positions)

    @classmethod
    def hexagonal(cls, n_markers=331, aperture=20.0, blob_sigma=0.22):
        """Markers on centred hexagonal rings.

        Parameters
        ----------
        n_markers : int, optional (default: 331)
            Number of markers, must be a centred hexagonal number.

        aperture : float, optional (default: 20)
            Edge length of the sensing aperture in mm.

        blob_sigma : float, optional (default: 0.22)
            Standard deviation of the marker blobs in mm.

        Returns
        -------
        grid : MarkerGrid
            Marker grid with spacing aperture / (2 * rings + 2).
        """
        rings = _centered_hexagonal_rings(n_markers)
        spacing = aperture / (2.0 * rings + 2.0)
        positions = []
        for r in range(-rings, rings + 1):
            for q in range(-rings, rings + 1):
                if abs(q + r) <= rings:
                    positions.append(
                        (spacing * (q + 0.5 * r),
                         spacing * 0.5 * np.sqrt(3.0) * r))
        return cls(np.array(positions), blob_sigma, aperture)

    def pixel_coordinates(self, geom):
        """Fractional (row, column) image coordinates of the markers."""
        return _to_pixel_coordinates(self.positions, geom)

    def cache_key(self, geom):
        return self.positions.tobytes(), self.blob_sigma, geom


def _to_pixel_coordinates(positions, geom):
    pixel_size = geom.pixel_size
    half = 0.5 * geom.image_size
    rows = half - 0.5 - positions[:, 1] / pixel_size
    cols = half - 0.5 + positions[:, 0] / pixel_size
    return rows, cols


@dataclass(frozen=True)
class MarkerGridConfig:
    """Serializable description of a hexagonal marker grid."""
    n_markers: int = 331
    blob_sigma: float = 0.22

    def build(self, geom):
        return MarkerGrid.hexagonal(
            self.n_markers, geom.sensing_aperture, self.blob_sigma)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MembraneParams:
    """Coefficients of the synthetic membrane.

    Parameters
    ----------
    alpha : float, optional (default: 0.5)
        Marker displacement in mm per unit depth gradient.

    beta : float, optional (default: 0.8)
        Coupling of lateral shear.

    gamma : float, optional (default: 0.8)
        Coupling of rotational shear.

    kappa : float, optional (default: 0.1)
        Growth of blobs per mm of vertical shear.

    contact_softness : float, optional (default: 2)
        Smoothing length of the contact weight in mm.
    """
    alpha: float = 0.5
    beta: float = 0.8
    gamma: float = 0.8
    kappa: float = 0.1
    contact_softness: float = 2.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "kappa"):
            if getattr(self, name) < 0.0:
                raise ConfigurationError("%s must not be negative" % name)
        if not self.contact_softness > 0.0:
            raise ConfigurationError("contact_softness must be positive")

    def to_dict(self):
        return asdict(self)


def sim_tactile_image(depth):
    """Simulated tactile image: depth normalized by the saturation depth.

    Parameters
    ----------
    depth : DepthImage
        Depth image.

    Returns
    -------
    image : TactileImage
        Image of domain 'sim'.
    """
    return TactileImage(
        np.clip(depth.values / depth.max_depth, 0.0, 1.0), "sim")


def marker_displacement_field(depth, shear, grid, params, geom):
    """Deform the marker grid.

    The contact weight c is the depth smoothed with the contact softness and
    divided by the saturation depth. A marker m moves by

    alpha * grad(d) + beta * c * (sx, sy) + gamma * c * syaw * perp(m - m_c)

    where d is the smoothed depth, m_c is the contact centroid and perp
    rotates by +90 degrees. Blobs are scaled by 1 + kappa * c * sz.

    Parameters
    ----------
    depth : DepthImage
        Depth image.

    shear : ShearVector
        Shear of the contact.

    grid : MarkerGrid
        Reference marker grid.

    params : MembraneParams
        Membrane coefficients.

    geom : SensorGeometry
        Sensor geometry.

    Returns
    -------
    positions : array, shape (n_markers, 2)
        Displaced marker centres in mm.

    scales : array, shape (n_markers,)
        Blob standard deviations in mm.
    """
    pixel_size = geom.pixel_size
    smoothed = gaussian_filter(
        depth.values, sigma=params.contact_softness / pixel_size,
        mode="constant")
    weight = np.clip(smoothed / depth.max_depth, 0.0, 1.0)
    grad_rows, grad_cols = np.gradient(smoothed, pixel_size)

    coords = np.vstack(grid.pixel_coordinates(geom))
    c = map_coordinates(weight, coords, order=1, mode="constant", cval=0.0)
    gradient = np.column_stack((
        map_coordinates(grad_cols, coords, order=1, mode="constant"),
        -map_coordinates(grad_rows, coords, order=1, mode="constant")))

    total = np.sum(smoothed)
    if total > 0.0:
        xs, ys = geom.pixel_grid()
        centroid = np.array([np.sum(smoothed * xs), np.sum(smoothed * ys)])
        centroid /= total
    else:
        centroid = np.zeros(2)
    offsets = grid.positions - centroid
    perp = np.column_stack((-offsets[:, 1], offsets[:, 0]))

    s = shear.as_array()
    displacements = (
        params.alpha * gradient
        + params.beta * c[:, np.newaxis] * s[np.newaxis, :2]
        + params.gamma * np.deg2rad(s[3]) * c[:, np.newaxis] * perp)
    displacements[c <= 0.0] = 0.0

    scales = grid.blob_sigma * (1.0 + params.kappa * c * s[2])
    scales = np.maximum(scales, 0.1 * grid.blob_sigma)
    return grid.positions + displacements, scales


def render_markers(positions, scales, geom, noise_amplitude=0.0, seed=None):
    """Rasterize Gaussian marker blobs.

    Parameters
    ----------
    positions : array, shape (n_markers, 2)
        Marker centres in mm.

    scales : float or array, shape (n_markers,)
        Blob standard deviations in mm.

    geom : SensorGeometry
        Sensor geometry.

    noise_amplitude : float, optional (default: 0)
        Amplitude of additive uniform pixel noise.

    seed : int, optional (default: None)
        Seed of the pixel noise.

    Returns
    -------
    image : TactileImage
        Image of domain 'real_synthetic'.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    scales = np.broadcast_to(
        np.asarray(scales, dtype=np.float64), (len(positions),))
    xs, ys = geom.pixel_grid()
    column_coords = xs[0]
    row_coords = ys[:, 0]

    inv_var = 0.5 / scales[:, np.newaxis] ** 2
    blobs_x = np.exp(
        -(column_coords[np.newaxis] - positions[:, 0, np.newaxis]) ** 2
        * inv_var)
    blobs_y = np.exp(
        -(row_coords[np.newaxis] - positions[:, 1, np.newaxis]) ** 2
        * inv_var)
    values = BLOB_AMPLITUDE * np.dot(blobs_y.T, blobs_x)

    if noise_amplitude > 0.0:
        rng = np.random.default_rng(seed)
        values = values + rng.uniform(
            -noise_amplitude, noise_amplitude, values.shape)
    return TactileImage(np.clip(values, 0.0, 1.0), "real_synthetic")


_RESTING_TEMPLATES = {}


def resting_template(grid, geom):
    """Image of the undeformed marker grid.

    The template is computed once per grid and geometry and shared
    read-only.

    Parameters
    ----------
    grid : MarkerGrid
        Marker grid.

    geom : SensorGeometry
        Sensor geometry.

    Returns
    -------
    image : TactileImage
        Resting-state image.
    """
    key = grid.cache_key(geom)
    if key not in _RESTING_TEMPLATES:
        image = render_markers(grid.positions, grid.blob_sigma, geom)
        image.values.setflags(write=False)
        _RESTING_TEMPLATES[key] = image
    return _RESTING_TEMPLATES[key]


def real_tactile_oracle(depth, shear, grid, params, geom, noise_amplitude=0.0,
                        seed=None):
    """Synthetic real tactile image with shear deformation.

    Parameters
    ----------
    depth : DepthImage
        Depth image.

    shear : ShearVector
        Shear of the contact.

    grid : MarkerGrid
        Reference marker grid.

    params : MembraneParams
        Membrane coefficients.

    geom : SensorGeometry
        Sensor geometry.

    noise_amplitude : float, optional (default: 0)
        Amplitude of additive uniform pixel noise.

    seed : int, optional (default: None)
        Seed of the pixel noise.

    Returns
    -------
    image : TactileImage
        Image of domain 'real_synthetic'.
    """
    positions, scales = marker_displacement_field(
        depth, shear, grid, params, geom)
    return render_markers(positions, scales, geom, noise_amplitude, seed)


def save_png(filename, image):
    """Store an image as 8-bit grayscale PNG.

    Parameters
    ----------
    filename : str or Path
        Output file.

    image : TactileImage or array, shape (H, W)
        Image with values in [0, 1].
    """
    values = np.round(255.0 * np.clip(np.asarray(image), 0.0, 1.0))
    if not cv2.imwrite(str(filename), values.astype(np.uint8)):
        raise IOError("Could not write image to '%s'" % filename)


def load_png(filename):
    """Load an 8-bit grayscale PNG.

    Parameters
    ----------
    filename : str or Path
        Image file.

    Returns
    -------
    values : array, shape (H, W)
        Pixel values in [0, 1].

    Raises
    ------
    DatasetError
        If the file cannot be decoded.
    """
    values = cv2.imread(str(filename), cv2.IMREAD_GRAYSCALE)
    if values is None:
        raise DatasetError("Could not decode image '%s'" % filename)
    return values.astype(np.float64) / 255.0
