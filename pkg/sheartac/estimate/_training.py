import copy
import logging
from dataclasses import dataclass, asdict

import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from ._losses import gaussian_nll
from ._networks import GaussianDensityNetwork
from ..contact import LABEL_NAMES
from ..dataset import load_arrays, as_manifest
from ..errors import ConfigurationError, DatasetError, TrainingDivergedError
from ..translate import TranslatorCheckpoint, TrainedTranslator


logger = logging.getLogger(__name__)


IMAGE_SOURCES = ("shpix2pix", "pix2pix", "real_synthetic")
CHECKPOINT_FORMAT = "sheartac-estimator"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class EstimatorConfig:
    """Architecture and training parameters of the Gaussian-density network.

    Parameters
    ----------
    label_dim : int, optional (default: 4)
        Number of predicted label components (4 or 6).

    image_size : int, optional (default: 64)
        Height and width of images.

    conv_channels : tuple, optional (default: (16, 32, 64))
        Channels of the convolution stages.

    hidden_width : int, optional (default: 128)
        Width of the hidden layer.

    epochs : int, optional (default: 50)
        Maximum number of epochs.

    batch_size : int, optional (default: 64)
        Size of minibatches.

    learning_rate : float, optional (default: 1e-4)
        Learning rate of Adam.

    patience : int, optional (default: 10)
        Epochs without improvement of the validation NLL before training
        stops.

    seed : int, optional (default: 0)
        Seed of weight initialization and batch order.

    training_image_source : str, optional (default: 'shpix2pix')
        Images the network is trained on: translated by 'shpix2pix' or
        'pix2pix', or the synthetic real images themselves.
    """
    label_dim: int = 4
    image_size: int = 64
    conv_channels: tuple = (16, 32, 64)
    hidden_width: int = 128
    epochs: int = 50
    batch_size: int = 64
    learning_rate: float = 1e-4
    patience: int = 10
    seed: int = 0
    training_image_source: str = "shpix2pix"

    def __post_init__(self):
        object.__setattr__(self, "conv_channels", tuple(self.conv_channels))
        if self.label_dim not in (4, 6):
            raise ConfigurationError(
                "label_dim must be 4 or 6, got %r" % (self.label_dim,))
        if self.training_image_source not in IMAGE_SOURCES:
            raise ConfigurationError(
                "Unknown training image source '%s', expected one of %s"
                % (self.training_image_source, IMAGE_SOURCES))
        if self.image_size % 2 ** len(self.conv_channels) != 0:
            raise ConfigurationError(
                "image_size %d is not divisible by 2^%d"
                % (self.image_size, len(self.conv_channels)))
        for name in ("hidden_width", "epochs", "batch_size", "patience"):
            if getattr(self, name) < 1:
                raise ConfigurationError("%s must be at least 1" % name)
        if not self.learning_rate > 0.0:
            raise ConfigurationError("learning_rate must be positive")

    @property
    def label_names(self):
        return LABEL_NAMES[:self.label_dim]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid estimator config: %s" % e)


def build_network(config):
    return GaussianDensityNetwork(config.image_size, config.conv_channels,
                                  config.hidden_width, config.label_dim)


class EstimatorCheckpoint:
    """Trained Gaussian-density network.

    Parameters
    ----------
    config : EstimatorConfig
        Configuration.

    state : dict
        Parameters of the network.

    label_mean : array, shape (label_dim,)
        Mean of the training labels.

    label_std : array, shape (label_dim,)
        Standard deviation of the training labels.

    curves : list of dict, optional (default: [])
        Per-epoch training and validation NLL.

    best_epoch : int, optional (default: 0)
        Epoch of the stored parameters.
    """
    def __init__(self, config, state, label_mean, label_std, curves=(),
                 best_epoch=0):
        self.config = config
        self.state = state
        self.label_mean = np.asarray(label_mean, dtype=np.float64)
        self.label_std = np.asarray(label_std, dtype=np.float64)
        self.curves = list(curves)
        self.best_epoch = best_epoch
        self._network = None

    def network(self):
        """Network in inference mode, built once per checkpoint."""
        if self._network is None:
            network = build_network(self.config)
            network.load_state_dict(self.state)
            self._network = network.eval()
        return self._network

    def save(self, filename):
        torch.save({
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "config": self.config.to_dict(),
            "state": self.state,
            "label_mean": self.label_mean.tolist(),
            "label_std": self.label_std.tolist(),
            "curves": self.curves,
            "best_epoch": self.best_epoch,
        }, filename)

    @classmethod
    def load(cls, filename):
        content = torch.load(filename, map_location="cpu", weights_only=True)
        if not isinstance(content, dict) \
                or content.get("format") != CHECKPOINT_FORMAT \
                or content.get("version") != CHECKPOINT_VERSION:
            raise ConfigurationError(
                "'%s' is not an estimator checkpoint of version %d"
                % (filename, CHECKPOINT_VERSION))
        return cls(EstimatorConfig.from_dict(content["config"]),
                   content["state"], content["label_mean"],
                   content["label_std"], content["curves"],
                   content["best_epoch"])


def _images_tensor(images):
    return torch.as_tensor(
        np.asarray(images, dtype=np.float32)[:, np.newaxis])


def predict_gaussians(network, images, label_mean, label_std, batch_size=256):
    """Predict label distributions for an array of images.

    Parameters
    ----------
    network : GaussianDensityNetwork
        Network in inference mode.

    images : array, shape (n_images, H, W)
        Tactile images.

    label_mean : array, shape (label_dim,)
        Mean of the training labels.

    label_std : array, shape (label_dim,)
        Standard deviation of the training labels.

    batch_size : int, optional (default: 256)
        Images per forward pass.

    Returns
    -------
    mean : array, shape (n_images, label_dim)
        Means in label units.

    variance : array, shape (n_images, label_dim)
        Variances in squared label units.
    """
    images = _images_tensor(images)
    means = []
    variances = []
    with torch.no_grad():
        for start in range(0, len(images), batch_size):
            mean, variance = network(images[start:start + batch_size])
            means.append(mean.numpy().astype(np.float64))
            variances.append(variance.numpy().astype(np.float64))
    label_dim = len(label_mean)
    if not means:
        return np.zeros((0, label_dim)), np.zeros((0, label_dim))
    mean = np.vstack(means) * label_std + label_mean
    variance = np.vstack(variances) * label_std ** 2
    return mean, variance


def training_images(arrays, config, translator_checkpoint=None):
    """Images an estimator is trained on.

    Parameters
    ----------
    arrays : dict
        Split loaded with :func:`~sheartac.dataset.load_arrays`.

    config : EstimatorConfig
        Selects the image source.

    translator_checkpoint : TranslatorCheckpoint, optional
        Required for translated sources, must match the source variant.

    Returns
    -------
    images : array, shape (n_images, H, W)
        Images.
    """
    source = config.training_image_source
    if source == "real_synthetic":
        return arrays["real"]
    if translator_checkpoint is None:
        raise ConfigurationError(
            "Training on %s images requires a translator checkpoint" % source)
    if not isinstance(translator_checkpoint, TranslatorCheckpoint):
        translator_checkpoint = TranslatorCheckpoint.load(
            translator_checkpoint)
    if translator_checkpoint.config.variant != source:
        raise ConfigurationError(
            "Training image source is %s but the translator is %s"
            % (source, translator_checkpoint.config.variant))
    return TrainedTranslator(translator_checkpoint).translate_batch(
        arrays["sim"], arrays["shear"], arrays["real"])


def train_estimator(manifest, translator_checkpoint, config, verbose=False):
    """Train a Gaussian-density network with the negative log-likelihood.

    Labels are standardized with the statistics of the training split.
    Early stopping monitors the NLL on validation images of the same source
    as the training images.

    Parameters
    ----------
    manifest : str, Path or DatasetManifest
        Dataset.

    translator_checkpoint : TranslatorCheckpoint, str, Path or None
        Translator that generates the training images from simulated
        images, None when training on synthetic real images.

    config : EstimatorConfig
        Configuration.

    verbose : bool, optional (default: False)
        Show a progress bar.

    Returns
    -------
    checkpoint : EstimatorCheckpoint
        Trained network.

    Raises
    ------
    TrainingDivergedError
        If the loss becomes non-finite.
    """
    manifest = as_manifest(manifest)
    image_size = manifest.config.geometry.image_size
    if config.image_size != image_size:
        raise ConfigurationError(
            "Estimator image_size %d does not match dataset image size %d"
            % (config.image_size, image_size))

    train = load_arrays(manifest, "train")
    if len(train["sim"]) == 0:
        raise DatasetError("Training split is empty")
    val = load_arrays(manifest, "val")
    if len(val["sim"]) == 0:
        logger.warning("Validation split is empty, monitoring training NLL")
        val = train
    train_images = training_images(train, config, translator_checkpoint)
    val_images = training_images(val, config, translator_checkpoint)

    labels = train["labels"][:, :config.label_dim]
    label_mean = labels.mean(axis=0)
    label_std = labels.std(axis=0)
    label_std[label_std < 1e-9] = 1.0
    standardized = (labels - label_mean) / label_std
    val_targets = torch.as_tensor(
        (val["labels"][:, :config.label_dim] - label_mean) / label_std,
        dtype=torch.float32)

    torch.manual_seed(config.seed)
    network = build_network(config)
    optimizer = torch.optim.Adam(network.parameters(),
                                 lr=config.learning_rate)
    loader = DataLoader(
        TensorDataset(_images_tensor(train_images),
                      torch.as_tensor(standardized, dtype=torch.float32)),
        batch_size=config.batch_size, shuffle=True,
        generator=torch.Generator().manual_seed(config.seed))

    logger.info("Training estimator on %d %s images for up to %d epochs",
                len(train_images), config.training_image_source,
                config.epochs)
    curves = []
    best_nll = np.inf
    best_epoch = 0
    best_state = None
    epochs_without_improvement = 0
    val_tensor = _images_tensor(val_images)
    for epoch in tqdm(range(1, config.epochs + 1), desc="estimator",
                      disable=not verbose):
        network.train()
        total = 0.0
        for batch, (images, targets) in enumerate(loader):
            mean, variance = network(images)
            loss = gaussian_nll(mean, variance, targets)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    "NLL became %s in epoch %d, batch %d"
                    % (loss.item(), epoch, batch))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * len(images)

        network.eval()
        with torch.no_grad():
            val_nll = gaussian_nll(*network(val_tensor), val_targets).item()
        train_nll = total / len(train_images)
        curves.append({"epoch": epoch, "train_nll": train_nll,
                       "val_nll": val_nll})
        logger.info("estimator epoch %d: train NLL %.4f, val NLL %.4f",
                    epoch, train_nll, val_nll)

        if val_nll < best_nll:
            best_nll = val_nll
            best_epoch = epoch
            best_state = copy.deepcopy(network.state_dict())
            epochs_without_improvement = 0
        else:
            epochs_without_improvement += 1
            if epochs_without_improvement >= config.patience:
                logger.warning(
                    "Stopping early after epoch %d, best val NLL %.4f in "
                    "epoch %d", epoch, best_nll, best_epoch)
                break

    if best_state is None:
        raise TrainingDivergedError("Validation NLL was never finite")
    return EstimatorCheckpoint(config, best_state, label_mean, label_std,
                               curves, best_epoch)
