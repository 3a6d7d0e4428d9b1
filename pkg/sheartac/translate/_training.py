import copy
import logging
from dataclasses import dataclass, asdict, replace

import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from ._losses import generator_loss, discriminator_loss
from ._networks import UNetGenerator, PatchDiscriminator, init_weights
from ..dataset import load_arrays, as_manifest
from ..errors import ConfigurationError, DatasetError, TrainingDivergedError


logger = logging.getLogger(__name__)


VARIANTS = ("pix2pix", "shpix2pix")
CHECKPOINT_FORMAT = "sheartac-translator"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TranslatorConfig:
    """Architecture and training parameters of an image translator.

    Parameters
    ----------
    variant : str, optional (default: 'shpix2pix')
        'pix2pix' or the shear-conditioned 'shpix2pix'.

    image_size : int, optional (default: 64)
        Height and width of images.

    encoder_channels : tuple, optional (default: (32, 64, 128, 128))
        Channels of the generator's encoder stages.

    discriminator_channels : tuple, optional (default: (32, 64, 128))
        Channels of the discriminator stages.

    bottleneck_fc_width : int, optional (default: flattened bottleneck)
        Width of the fully connected bottleneck layer of shpix2pix.

    shear_input_dim : int, optional (default: 4 for shpix2pix, 0 otherwise)
        Number of shear components fed to the generator.

    shear_scale : tuple, optional (default: from the dataset)
        Per-component divisor of the shear vector.

    adversarial_weight : float, optional (default: 1)
        Weight of the adversarial loss.

    reconstruction_weight : float, optional (default: 100)
        Weight of the mean absolute pixel error.

    epochs : int, optional (default: 100)
        Maximum number of epochs.

    batch_size : int, optional (default: 16)
        Size of minibatches.

    learning_rate : float, optional (default: 1e-4)
        Learning rate of Adam.

    betas : tuple, optional (default: (0.5, 0.999))
        Moment decay rates of Adam.

    patience : int, optional (default: 10)
        Epochs without improvement of the validation error before training
        stops.

    seed : int, optional (default: 0)
        Seed of weight initialization and batch order.
    """
    variant: str = "shpix2pix"
    image_size: int = 64
    encoder_channels: tuple = (32, 64, 128, 128)
    discriminator_channels: tuple = (32, 64, 128)
    bottleneck_fc_width: int = None
    shear_input_dim: int = None
    shear_scale: tuple = None
    adversarial_weight: float = 1.0
    reconstruction_weight: float = 100.0
    epochs: int = 100
    batch_size: int = 16
    learning_rate: float = 1e-4
    betas: tuple = (0.5, 0.999)
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                "Unknown translator variant '%s', expected one of %s"
                % (self.variant, VARIANTS))
        if self.shear_input_dim is None:
            object.__setattr__(self, "shear_input_dim",
                               4 if self.variant == "shpix2pix" else 0)
        if (self.shear_input_dim > 0) != (self.variant == "shpix2pix"):
            raise ConfigurationError(
                "%s requires %s shear input, got shear_input_dim=%d"
                % (self.variant,
                   "a" if self.variant == "shpix2pix" else "no",
                   self.shear_input_dim))
        for name in ("encoder_channels", "discriminator_channels", "betas"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.shear_scale is not None:
            scale = tuple(float(s) for s in self.shear_scale)
            if len(scale) < self.shear_input_dim or min(scale) <= 0.0:
                raise ConfigurationError(
                    "shear_scale must hold %d positive values, got %s"
                    % (self.shear_input_dim, scale))
            object.__setattr__(self, "shear_scale", scale)
        if self.image_size % 2 ** len(self.encoder_channels) != 0:
            raise ConfigurationError(
                "image_size %d is not divisible by 2^%d"
                % (self.image_size, len(self.encoder_channels)))
        if self.adversarial_weight < 0.0 or self.reconstruction_weight < 0.0:
            raise ConfigurationError("Loss weights must not be negative")
        for name in ("epochs", "batch_size", "patience"):
            if getattr(self, name) < 1:
                raise ConfigurationError("%s must be at least 1" % name)
        if not self.learning_rate > 0.0:
            raise ConfigurationError("learning_rate must be positive")

    @property
    def conditioned(self):
        return self.shear_input_dim > 0

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigurationError("Invalid translator config: %s" % e)


def build_generator(config):
    return UNetGenerator(config.image_size, config.encoder_channels,
                         config.shear_input_dim, config.bottleneck_fc_width)


def build_discriminator(config):
    return PatchDiscriminator(config.discriminator_channels)


class TranslatorCheckpoint:
    """Trained translator.

    Parameters
    ----------
    config : TranslatorConfig
        Configuration, including the shear scale used in training.

    generator_state : dict
        Parameters of the generator.

    discriminator_state : dict
        Parameters of the discriminator.

    curves : list of dict, optional (default: [])
        Per-epoch losses and validation error.

    best_epoch : int, optional (default: 0)
        Epoch of the stored parameters.
    """
    def __init__(self, config, generator_state, discriminator_state,
                 curves=(), best_epoch=0):
        self.config = config
        self.generator_state = generator_state
        self.discriminator_state = discriminator_state
        self.curves = list(curves)
        self.best_epoch = best_epoch
        self._modules = {}

    def generator(self):
        """Generator in inference mode, built once per checkpoint."""
        if "generator" not in self._modules:
            generator = build_generator(self.config)
            generator.load_state_dict(self.generator_state)
            self._modules["generator"] = generator.eval()
        return self._modules["generator"]

    def discriminator(self):
        """Discriminator in inference mode, built once per checkpoint."""
        if "discriminator" not in self._modules:
            discriminator = build_discriminator(self.config)
            discriminator.load_state_dict(self.discriminator_state)
            self._modules["discriminator"] = discriminator.eval()
        return self._modules["discriminator"]

    def save(self, filename):
        torch.save({
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "config": self.config.to_dict(),
            "generator": self.generator_state,
            "discriminator": self.discriminator_state,
            "curves": self.curves,
            "best_epoch": self.best_epoch,
        }, filename)

    @classmethod
    def load(cls, filename):
        """Load a checkpoint.

        Parameters
        ----------
        filename : str or Path
            Checkpoint file.

        Returns
        -------
        checkpoint : TranslatorCheckpoint
            Checkpoint.

        Raises
        ------
        ConfigurationError
            If the file is not a translator checkpoint of this version.
        """
        content = torch.load(filename, map_location="cpu", weights_only=True)
        if not isinstance(content, dict) \
                or content.get("format") != CHECKPOINT_FORMAT \
                or content.get("version") != CHECKPOINT_VERSION:
            raise ConfigurationError(
                "'%s' is not a translator checkpoint of version %d"
                % (filename, CHECKPOINT_VERSION))
        return cls(TranslatorConfig.from_dict(content["config"]),
                   content["generator"], content["discriminator"],
                   content["curves"], content["best_epoch"])


def scale_shear(shear, config):
    """Shear vectors as fed to the generator.

    Parameters
    ----------
    shear : array, shape (n_samples, 4)
        Shear vectors in mm and degrees.

    config : TranslatorConfig
        Configuration with shear_scale.

    Returns
    -------
    scaled : array, shape (n_samples, shear_input_dim)
        Scaled shear.
    """
    if config.shear_scale is None:
        raise ConfigurationError("Translator config has no shear_scale")
    shear = np.asarray(shear, dtype=np.float64).reshape(-1, 4)
    dim = config.shear_input_dim
    return shear[:, :dim] / np.asarray(config.shear_scale[:dim])


def _as_tensor(images):
    return torch.as_tensor(
        np.asarray(images, dtype=np.float32)[:, np.newaxis])


def predict_images(generator, sim, shear, config, batch_size=64):
    """Translate arrays of simulated images.

    Parameters
    ----------
    generator : UNetGenerator
        Generator in inference mode.

    sim : array, shape (n_images, H, W)
        Simulated images.

    shear : array, shape (n_images, 4)
        Shear vectors, ignored by unconditioned generators.

    config : TranslatorConfig
        Configuration.

    batch_size : int, optional (default: 64)
        Images per forward pass.

    Returns
    -------
    generated : array, shape (n_images, H, W)
        Generated images.
    """
    sim = _as_tensor(sim)
    if config.conditioned:
        shear = torch.as_tensor(scale_shear(shear, config), dtype=torch.float32)
    generated = []
    with torch.no_grad():
        for start in range(0, len(sim), batch_size):
            batch_shear = shear[start:start + batch_size] \
                if config.conditioned else None
            generated.append(
                generator(sim[start:start + batch_size], batch_shear))
    if not generated:
        return np.zeros((0,) + tuple(sim.shape[2:]))
    return torch.cat(generated)[:, 0].numpy().astype(np.float64)


def train_translator(manifest, config, verbose=False):
    """Train an image translator on a paired dataset.

    Generator and discriminator are updated alternately with Adam. Training
    stops early when the validation error has not improved for `patience`
    epochs and returns the parameters of the best epoch.

    Parameters
    ----------
    manifest : str, Path or DatasetManifest
        Dataset.

    config : TranslatorConfig
        Configuration. A missing shear scale is taken from the ranges of
        the dataset.

    verbose : bool, optional (default: False)
        Show progress bars.

    Returns
    -------
    checkpoint : TranslatorCheckpoint
        Trained translator.

    Raises
    ------
    TrainingDivergedError
        If the generator loss becomes non-finite.
    """
    manifest = as_manifest(manifest)
    image_size = manifest.config.geometry.image_size
    if config.image_size != image_size:
        raise ConfigurationError(
            "Translator image_size %d does not match dataset image size %d"
            % (config.image_size, image_size))
    if config.shear_scale is None:
        config = replace(config, shear_scale=tuple(
            manifest.config.ranges.shear_scale.tolist()))

    train = load_arrays(manifest, "train")
    if len(train["sim"]) == 0:
        raise DatasetError("Training split is empty")
    val = load_arrays(manifest, "val")
    if len(val["sim"]) == 0:
        logger.warning("Validation split is empty, monitoring training error")
        val = train

    torch.manual_seed(config.seed)
    generator = build_generator(config)
    discriminator = build_discriminator(config)
    init_weights(generator)
    init_weights(discriminator)
    optimizer_g = torch.optim.Adam(
        generator.parameters(), lr=config.learning_rate, betas=config.betas)
    optimizer_d = torch.optim.Adam(
        discriminator.parameters(), lr=config.learning_rate,
        betas=config.betas)

    shear = scale_shear(train["shear"], config) if config.conditioned \
        else np.zeros((len(train["sim"]), 1))
    loader = DataLoader(
        TensorDataset(_as_tensor(train["sim"]), _as_tensor(train["real"]),
                      torch.as_tensor(shear, dtype=torch.float32)),
        batch_size=config.batch_size, shuffle=True,
        generator=torch.Generator().manual_seed(config.seed))

    logger.info("Training %s on %d pairs for up to %d epochs",
                config.variant, len(train["sim"]), config.epochs)
    curves = []
    best_mape = np.inf
    best_epoch = 0
    best_states = None
    epochs_without_improvement = 0
    for epoch in tqdm(range(1, config.epochs + 1), desc=config.variant,
                      disable=not verbose):
        generator.train()
        discriminator.train()
        g_total = 0.0
        d_total = 0.0
        for batch, (sim, real, batch_shear) in enumerate(loader):
            if not config.conditioned:
                batch_shear = None
            fake = generator(sim, batch_shear)

            d_loss = discriminator_loss(
                discriminator(sim, real), discriminator(sim, fake.detach()))
            optimizer_d.zero_grad()
            d_loss.backward()
            optimizer_d.step()

            g_loss = generator_loss(
                fake, real, discriminator(sim, fake),
                config.reconstruction_weight, config.adversarial_weight)
            if not torch.isfinite(g_loss):
                raise TrainingDivergedError(
                    "Generator loss became %s in epoch %d, batch %d"
                    % (g_loss.item(), epoch, batch))
            optimizer_g.zero_grad()
            g_loss.backward()
            optimizer_g.step()
            g_total += g_loss.item() * len(sim)
            d_total += d_loss.item() * len(sim)

        generator.eval()
        generated = predict_images(
            generator, val["sim"], val["shear"], config)
        val_mape = float(np.mean(np.abs(generated - val["real"])))
        n_train = len(train["sim"])
        curves.append({"epoch": epoch,
                       "generator_loss": g_total / n_train,
                       "discriminator_loss": d_total / n_train,
                       "val_mape": val_mape})
        logger.info("%s epoch %d: generator loss %.4f, discriminator loss "
                    "%.4f, val MAPE %.4f", config.variant, epoch,
                    g_total / n_train, d_total / n_train, val_mape)

        if val_mape < best_mape:
            best_mape = val_mape
            best_epoch = epoch
            best_states = (copy.deepcopy(generator.state_dict()),
                           copy.deepcopy(discriminator.state_dict()))
            epochs_without_improvement = 0
        else:
            epochs_without_improvement += 1
            if epochs_without_improvement >= config.patience:
                logger.warning(
                    "Stopping early after epoch %d, best val MAPE %.4f in "
                    "epoch %d", epoch, best_mape, best_epoch)
                break

    if best_states is None:
        raise TrainingDivergedError("Validation MAPE was never finite")
    return TranslatorCheckpoint(config, best_states[0], best_states[1],
                                curves, best_epoch)
