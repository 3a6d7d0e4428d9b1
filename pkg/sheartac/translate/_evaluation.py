import abc
import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from tabulate import tabulate

from ._training import (
    TranslatorCheckpoint, predict_images, scale_shear, _as_tensor)
from ..dataset import load_arrays, as_manifest
from ..errors import ConfigurationError, DatasetError
from ..metrics import mape, ssim
from ..sensor import TactileImage


logger = logging.getLogger(__name__)


def _checked_image(image, config, name):
    values = np.asarray(image, dtype=np.float64)
    if values.shape != (config.image_size, config.image_size):
        raise ValueError("%s has shape %s, translator expects %d x %d"
                         % (name, values.shape, config.image_size,
                            config.image_size))
    return values


def generator_forward(sim_image, shear, checkpoint):
    """Translate a simulated image.

    Parameters
    ----------
    sim_image : TactileImage
        Simulated image.

    shear : ShearVector or None
        Shear of the contact. Required for shpix2pix and rejected by
        pix2pix.

    checkpoint : TranslatorCheckpoint
        Trained translator.

    Returns
    -------
    image : TactileImage
        Generated image.

    Raises
    ------
    ConfigurationError
        If the presence of shear does not match the variant.
    """
    config = checkpoint.config
    values = _checked_image(sim_image, config, "Simulated image")
    shear_tensor = None
    if shear is not None:
        if not config.conditioned:
            raise ConfigurationError(
                "%s does not accept a shear vector" % config.variant)
        shear_tensor = torch.as_tensor(
            scale_shear(shear.as_array(), config), dtype=torch.float32)
    elif config.conditioned:
        raise ConfigurationError(
            "%s requires a shear vector" % config.variant)
    with torch.no_grad():
        generated = checkpoint.generator()(
            _as_tensor(values[np.newaxis]), shear_tensor)
    return TactileImage(generated[0, 0].numpy().astype(np.float64),
                        "generated")


def discriminator_forward(sim_image, candidate_image, checkpoint):
    """Score how real a candidate image looks given the simulated image.

    Parameters
    ----------
    sim_image : TactileImage
        Simulated image.

    candidate_image : TactileImage
        Real or generated image.

    checkpoint : TranslatorCheckpoint
        Trained translator.

    Returns
    -------
    scores : array, shape (h, w)
        Realness per patch.
    """
    config = checkpoint.config
    sim = _checked_image(sim_image, config, "Simulated image")
    candidate = _checked_image(candidate_image, config, "Candidate image")
    with torch.no_grad():
        scores = checkpoint.discriminator()(
            _as_tensor(sim[np.newaxis]), _as_tensor(candidate[np.newaxis]))
    return scores[0, 0].numpy().astype(np.float64)


class Translator(abc.ABC):
    """Maps simulated images to real-looking images."""
    name = None

    @abc.abstractmethod
    def translate_batch(self, sim, shear, real):
        """Translate arrays of images.

        Parameters
        ----------
        sim : array, shape (n_images, H, W)
            Simulated images.

        shear : array, shape (n_images, 4)
            Shear vectors.

        real : array, shape (n_images, H, W)
            Real images, only used by reference translators.

        Returns
        -------
        generated : array, shape (n_images, H, W)
            Translated images.
        """

    def translate(self, sim_image, shear, real_image=None):
        """Translate a single image.

        Parameters
        ----------
        sim_image : TactileImage
            Simulated image.

        shear : ShearVector
            Shear of the contact.

        real_image : TactileImage, optional (default: None)
            Real image, only used by reference translators.

        Returns
        -------
        image : TactileImage
            Generated image.
        """
        sim = np.asarray(sim_image)[np.newaxis]
        real = sim if real_image is None else np.asarray(real_image)[
            np.newaxis]
        generated = self.translate_batch(
            sim, shear.as_array()[np.newaxis], real)
        return TactileImage(generated[0], "generated")


class TrainedTranslator(Translator):
    """Translator backed by a checkpoint.

    Unconditioned generators never see the shear vector.

    Parameters
    ----------
    checkpoint : TranslatorCheckpoint or str or Path
        Checkpoint or checkpoint file.

    batch_size : int, optional (default: 64)
        Images per forward pass.
    """
    def __init__(self, checkpoint, batch_size=64):
        if not isinstance(checkpoint, TranslatorCheckpoint):
            checkpoint = TranslatorCheckpoint.load(checkpoint)
        self.checkpoint = checkpoint
        self.name = checkpoint.config.variant
        self.batch_size = batch_size
        self._generator = checkpoint.generator()

    def translate_batch(self, sim, shear, real):
        return predict_images(self._generator, sim, shear,
                              self.checkpoint.config, self.batch_size)


class IdentityTranslator(Translator):
    """Returns the real image, the upper bound of any translator."""
    name = "identity"

    def translate_batch(self, sim, shear, real):
        return np.array(real, dtype=np.float64)


class PassthroughTranslator(Translator):
    """Returns the simulated image unchanged."""
    name = "passthrough"

    def translate_batch(self, sim, shear, real):
        return np.array(sim, dtype=np.float64)


@dataclass
class TranslationMetrics:
    """Image similarity of translated and real images.

    Parameters
    ----------
    variant : str
        Name of the translator.

    rows : dict
        Per contact type and 'overall' a dict with 'mape', 'ssim' and the
        number of samples 'n'.
    """
    variant: str
    rows: dict = field(default_factory=dict)

    def to_dict(self):
        return {"variant": self.variant, "rows": self.rows}

    @classmethod
    def from_dict(cls, content):
        return cls(content["variant"], content["rows"])


def _as_translator(translator):
    if isinstance(translator, Translator):
        return translator
    return TrainedTranslator(translator)


def eval_translation(translator, manifest, split="val"):
    """Compare translated images with real images of a split.

    Parameters
    ----------
    translator : Translator, TranslatorCheckpoint, str or Path
        Translator or checkpoint.

    manifest : str, Path or DatasetManifest
        Dataset.

    split : str, optional (default: 'val')
        Split to evaluate on.

    Returns
    -------
    metrics : TranslationMetrics
        Mean MAPE and SSIM per contact type and overall.

    Raises
    ------
    DatasetError
        If the split is empty.
    """
    translator = _as_translator(translator)
    arrays = load_arrays(as_manifest(manifest), split)
    n_samples = len(arrays["sim"])
    if n_samples == 0:
        raise DatasetError("Cannot evaluate on empty split '%s'" % split)
    generated = translator.translate_batch(
        arrays["sim"], arrays["shear"], arrays["real"])

    errors = np.array([mape(g, r) for g, r in zip(generated, arrays["real"])])
    similarities = np.array(
        [ssim(g, r) for g, r in zip(generated, arrays["real"])])
    contact_types = np.array(arrays["contact_types"])
    rows = {}
    for contact_type in sorted(set(arrays["contact_types"])):
        mask = contact_types == contact_type
        rows[contact_type] = _row(errors[mask], similarities[mask])
    rows["overall"] = _row(errors, similarities)
    logger.info("%s on %s split: MAPE %.4f, SSIM %.4f", translator.name,
                split, rows["overall"]["mape"], rows["overall"]["ssim"])
    return TranslationMetrics(translator.name, rows)


def _row(errors, similarities):
    return {"mape": float(np.mean(errors)),
            "ssim": float(np.mean(similarities)),
            "n": int(len(errors))}


TABLE_COLUMNS = ("edge", "surface", "overall")


def format_translation_table(metrics, tablefmt="github"):
    """Render metrics of several translators as a text table.

    Parameters
    ----------
    metrics : list of TranslationMetrics
        One entry per translator, one row of the table each.

    tablefmt : str, optional (default: 'github')
        Format of tabulate.

    Returns
    -------
    table : str
        Table with MAPE and SSIM columns per contact type and overall.
    """
    headers = ["variant"]
    for column in TABLE_COLUMNS:
        headers.extend(["%s MAPE" % column.capitalize(),
                        "%s SSIM" % column.capitalize()])
    rows = []
    for m in metrics:
        row = [m.variant]
        for column in TABLE_COLUMNS:
            values = m.rows.get(column)
            if values is None:
                row.extend(["-", "-"])
            else:
                row.extend(["%.3f" % values["mape"], "%.3f" % values["ssim"]])
        rows.append(row)
    return tabulate(rows, headers=headers, tablefmt=tablefmt)
