import abc
import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import ttest_rel
from tabulate import tabulate

from ._training import EstimatorCheckpoint, predict_gaussians
from ..contact import ContactLabel, LABEL_NAMES
from ..dataset import load_arrays, load_labels, as_manifest
from ..errors import DatasetError


logger = logging.getLogger(__name__)


class GaussianPrediction:
    """Independent Gaussian distribution per label component.

    Parameters
    ----------
    mean : array, shape (label_dim,)
        Means in mm and degrees.

    variance : array, shape (label_dim,)
        Strictly positive variances.
    """
    def __init__(self, mean, variance):
        mean = np.asarray(mean, dtype=np.float64)
        variance = np.asarray(variance, dtype=np.float64)
        if mean.shape != variance.shape or mean.ndim != 1:
            raise ValueError("Mean and variance must be vectors of equal "
                             "length, got %s and %s"
                             % (mean.shape, variance.shape))
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(variance)):
            raise ValueError("Prediction must be finite")
        if np.any(variance <= 0.0):
            raise ValueError("Variances must be positive")
        self.mean = mean
        self.variance = variance

    @property
    def label_dim(self):
        return len(self.mean)

    def component(self, name, default=0.0):
        """Predicted mean of a named component or a default if absent."""
        index = LABEL_NAMES.index(name)
        if index < self.label_dim:
            return float(self.mean[index])
        return default

    def to_dict(self):
        return {"mean": self.mean.tolist(), "variance": self.variance.tolist()}

    def __repr__(self):
        return "GaussianPrediction(mean=%s, variance=%s)" % (
            np.round(self.mean, 4).tolist(),
            np.round(self.variance, 6).tolist())


def gdnn_forward(image, checkpoint):
    """Predict contact pose and shear from a tactile image.

    Parameters
    ----------
    image : TactileImage or array, shape (H, W)
        Tactile image.

    checkpoint : EstimatorCheckpoint
        Trained network.

    Returns
    -------
    prediction : GaussianPrediction
        Distribution over the label components.
    """
    return TrainedEstimator(checkpoint).predict(image)


class Estimator(abc.ABC):
    """Estimates contact pose and shear from tactile images."""
    label_dim = None

    @abc.abstractmethod
    def predict(self, image, label=None):
        """Predict the label distribution of a tactile image.

        Parameters
        ----------
        image : TactileImage
            Tactile image.

        label : ContactLabel, optional (default: None)
            Ground truth, only used by reference estimators.

        Returns
        -------
        prediction : GaussianPrediction
            Prediction.
        """

    def predict_batch(self, images, labels=None):
        """Predict label distributions of an array of images.

        Parameters
        ----------
        images : array, shape (n_images, H, W)
            Tactile images.

        labels : array, shape (n_images, 6), optional (default: None)
            Ground truth, only used by reference estimators.

        Returns
        -------
        mean : array, shape (n_images, label_dim)
            Means.

        variance : array, shape (n_images, label_dim)
            Variances.
        """
        if labels is None:
            labels = [None] * len(images)
        else:
            labels = [ContactLabel.from_array(label) for label in labels]
        predictions = [self.predict(image, label)
                       for image, label in zip(images, labels)]
        label_dim = self.label_dim
        return (np.array([p.mean for p in predictions]).reshape(-1, label_dim),
                np.array([p.variance for p in predictions]).reshape(
                    -1, label_dim))


class TrainedEstimator(Estimator):
    """Estimator backed by a checkpoint.

    Parameters
    ----------
    checkpoint : EstimatorCheckpoint, str or Path
        Checkpoint or checkpoint file.
    """
    def __init__(self, checkpoint):
        if not isinstance(checkpoint, EstimatorCheckpoint):
            checkpoint = EstimatorCheckpoint.load(checkpoint)
        self.checkpoint = checkpoint
        self.label_dim = checkpoint.config.label_dim
        self._network = checkpoint.network()

    def predict(self, image, label=None):
        values = np.asarray(image, dtype=np.float64)
        size = self.checkpoint.config.image_size
        if values.shape != (size, size):
            raise ValueError("Image has shape %s, estimator expects %d x %d"
                             % (values.shape, size, size))
        mean, variance = self.predict_batch(values[np.newaxis])
        return GaussianPrediction(mean[0], variance[0])

    def predict_batch(self, images, labels=None):
        return predict_gaussians(
            self._network, images, self.checkpoint.label_mean,
            self.checkpoint.label_std)


class OracleEstimator(Estimator):
    """Returns the true label with a small variance.

    Parameters
    ----------
    label_dim : int, optional (default: 6)
        Number of returned components.

    variance : float, optional (default: 1e-6)
        Reported variance.
    """
    def __init__(self, label_dim=6, variance=1e-6):
        self.label_dim = label_dim
        self.variance = variance

    def predict(self, image, label=None):
        if label is None:
            raise ValueError("The oracle estimator needs the true label")
        return GaussianPrediction(label.as_array(self.label_dim),
                                  np.full(self.label_dim, self.variance))


@dataclass
class EstimatorReport:
    """Per-component errors of an estimator.

    Parameters
    ----------
    names : tuple
        Label components.

    mae : array, shape (label_dim,)
        Mean absolute error of the predicted means.

    baseline_mae : array, shape (label_dim,)
        Mean absolute error of predicting the training label mean.

    nll : float
        Mean negative log-likelihood.

    residual_variance : array, shape (label_dim,)
        Empirical variance of the standardized residuals.

    abs_errors : array, shape (n_samples, label_dim)
        Absolute errors per sample.

    baseline_abs_errors : array, shape (n_samples, label_dim)
        Absolute errors of the baseline per sample.
    """
    names: tuple
    mae: np.ndarray
    baseline_mae: np.ndarray
    nll: float
    residual_variance: np.ndarray
    abs_errors: np.ndarray
    baseline_abs_errors: np.ndarray

    def to_dict(self):
        return {
            "names": list(self.names),
            "mae": dict(zip(self.names, self.mae.tolist())),
            "baseline_mae": dict(zip(self.names, self.baseline_mae.tolist())),
            "nll": self.nll,
            "residual_variance": dict(
                zip(self.names, self.residual_variance.tolist())),
            "n_samples": int(len(self.abs_errors)),
        }


def eval_estimator(estimator, manifest, split="val"):
    """Evaluate an estimator on the synthetic real images of a split.

    Parameters
    ----------
    estimator : Estimator, EstimatorCheckpoint, str or Path
        Estimator or trained network.

    manifest : str, Path or DatasetManifest
        Dataset.

    split : str, optional (default: 'val')
        Split to evaluate on.

    Returns
    -------
    report : EstimatorReport
        Errors per label component.

    Raises
    ------
    DatasetError
        If the split is empty.
    """
    if not isinstance(estimator, Estimator):
        estimator = TrainedEstimator(estimator)
    manifest = as_manifest(manifest)
    arrays = load_arrays(manifest, split)
    if len(arrays["real"]) == 0:
        raise DatasetError("Cannot evaluate on empty split '%s'" % split)

    label_dim = estimator.label_dim
    labels = arrays["labels"][:, :label_dim]
    train_labels, _, _ = load_labels(manifest, "train", label_dim)
    baseline = train_labels.mean(axis=0) if len(train_labels) \
        else np.zeros(label_dim)
    mean, variance = estimator.predict_batch(arrays["real"], arrays["labels"])
    residuals = labels - mean
    nll = 0.5 * (np.log(2.0 * np.pi * variance) + residuals ** 2 / variance)
    abs_errors = np.abs(residuals)
    baseline_abs_errors = np.abs(labels - baseline)
    report = EstimatorReport(
        names=LABEL_NAMES[:label_dim],
        mae=abs_errors.mean(axis=0),
        baseline_mae=baseline_abs_errors.mean(axis=0),
        nll=float(np.mean(np.sum(nll, axis=1))),
        residual_variance=np.var(residuals / np.sqrt(variance), axis=0),
        abs_errors=abs_errors,
        baseline_abs_errors=baseline_abs_errors)
    logger.info("Estimator on %s split: MAE %s, NLL %.4f", split,
                dict(zip(report.names, np.round(report.mae, 3).tolist())),
                report.nll)
    return report


def compare_to_baseline(report):
    """Paired two-sided t-tests of absolute errors against the baseline.

    Parameters
    ----------
    report : EstimatorReport
        Evaluation result.

    Returns
    -------
    tests : dict
        Per component the t statistic and p-value. Negative statistics mean
        that the estimator is better than the baseline.
    """
    tests = {}
    for i, name in enumerate(report.names):
        result = ttest_rel(report.abs_errors[:, i],
                           report.baseline_abs_errors[:, i])
        tests[name] = {"statistic": float(result.statistic),
                       "pvalue": float(result.pvalue)}
    return tests


def format_estimator_table(reports, tablefmt="github"):
    """Render the errors of several estimators as a text table.

    Parameters
    ----------
    reports : dict
        Estimator reports by name.

    tablefmt : str, optional (default: 'github')
        Format of tabulate.

    Returns
    -------
    table : str
        One row per estimator with the MAE of every component, followed by
        the baseline.
    """
    names = None
    rows = []
    for name, report in reports.items():
        names = report.names
        rows.append([name] + ["%.3f" % v for v in report.mae]
                    + ["%.3f" % report.nll])
    if names is None:
        raise ValueError("No reports to tabulate")
    last = list(reports.values())[-1]
    rows.append(["baseline"] + ["%.3f" % v for v in last.baseline_mae]
                + ["-"])
    return tabulate(rows, headers=["estimator"] + list(names) + ["NLL"],
                    tablefmt=tablefmt)
