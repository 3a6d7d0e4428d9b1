"""Estimation of contact pose and shear with Gaussian-density networks."""
from ._networks import GaussianDensityNetwork, VARIANCE_FLOOR
from ._losses import gaussian_nll, nll_loss
from ._training import (
    IMAGE_SOURCES, EstimatorConfig, EstimatorCheckpoint, build_network,
    predict_gaussians, training_images, train_estimator)
from ._evaluation import (
    GaussianPrediction, gdnn_forward, Estimator, TrainedEstimator,
    OracleEstimator, EstimatorReport, eval_estimator, compare_to_baseline,
    format_estimator_table)


__all__ = [
    "GaussianDensityNetwork", "VARIANCE_FLOOR", "gaussian_nll", "nll_loss",
    "IMAGE_SOURCES", "EstimatorConfig", "EstimatorCheckpoint",
    "build_network", "predict_gaussians", "training_images",
    "train_estimator", "GaussianPrediction", "gdnn_forward", "Estimator",
    "TrainedEstimator", "OracleEstimator", "EstimatorReport",
    "eval_estimator", "compare_to_baseline", "format_estimator_table"]
