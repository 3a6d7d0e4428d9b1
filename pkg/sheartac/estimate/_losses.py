import math

import numpy as np
import torch


LOG_2PI = math.log(2.0 * math.pi)


def gaussian_nll(mean, variance, target):
    """Negative log-likelihood of independent Gaussians.

    Parameters
    ----------
    mean : tensor, shape (n_samples, n_components)
        Predicted means.

    variance : tensor, shape (n_samples, n_components)
        Predicted variances.

    target : tensor, shape (n_samples, n_components)
        Observed values.

    Returns
    -------
    loss : tensor, shape ()
        Sum over components, mean over samples.
    """
    nll = 0.5 * (LOG_2PI + torch.log(variance)) \
        + (target - mean) ** 2 / (2.0 * variance)
    return torch.mean(torch.sum(nll, dim=-1))


def nll_loss(prediction, label):
    """Negative log-likelihood of a label under a prediction.

    Parameters
    ----------
    prediction : GaussianPrediction
        Predicted distribution.

    label : ContactLabel or array, shape (label_dim,) or (n, label_dim)
        Ground truth. Labels are truncated to the predicted components.

    Returns
    -------
    loss : float
        Sum over components of 0.5 ln(2 pi var) + (y - mu)^2 / (2 var),
        averaged over samples.

    Raises
    ------
    ValueError
        If a variance is not positive or the dimensions differ.
    """
    if hasattr(label, "as_array"):
        label = label.as_array(prediction.label_dim)
    target = np.asarray(label, dtype=np.float64)
    mean = np.asarray(prediction.mean, dtype=np.float64)
    variance = np.asarray(prediction.variance, dtype=np.float64)
    if target.shape != mean.shape:
        raise ValueError("Label shape %s does not match prediction shape %s"
                         % (target.shape, mean.shape))
    if np.any(variance <= 0.0):
        raise ValueError("Variances must be positive")
    return float(gaussian_nll(
        torch.as_tensor(np.atleast_2d(mean)),
        torch.as_tensor(np.atleast_2d(variance)),
        torch.as_tensor(np.atleast_2d(target))))
