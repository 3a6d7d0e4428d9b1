"""Image similarity metrics."""
import numpy as np
from skimage.metrics import structural_similarity


SSIM_WINDOW = 11


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("Images must have the same shape, got %s and %s"
                         % (a.shape, b.shape))
    return a, b


def mape(a, b):
    """Mean absolute pixel error.

    Parameters
    ----------
    a : TactileImage or array, shape (H, W)
        Image with values in [0, 1].

    b : TactileImage or array, shape (H, W)
        Image with values in [0, 1].

    Returns
    -------
    error : float
        Mean over pixels of |a - b|.
    """
    a, b = _pair(a, b)
    return float(np.mean(np.abs(a - b)))


def ssim(a, b):
    """Structural similarity index.

    We use an 11x11 Gaussian window with standard deviation 1.5 and the
    stabilizers (0.01 L)^2 and (0.03 L)^2 with data range L = 1.

    Parameters
    ----------
    a : TactileImage or array, shape (H, W)
        Image with values in [0, 1].

    b : TactileImage or array, shape (H, W)
        Image with values in [0, 1].

    Returns
    -------
    similarity : float
        Mean structural similarity in [-1, 1].
    """
    a, b = _pair(a, b)
    if a.ndim != 2 or min(a.shape) < SSIM_WINDOW:
        raise ValueError(
            "SSIM requires 2D images of at least %dx%d pixels, got %s"
            % (SSIM_WINDOW, SSIM_WINDOW, a.shape))
    return float(structural_similarity(
        a, b, gaussian_weights=True, sigma=1.5,
        use_sample_covariance=False, data_range=1.0))
