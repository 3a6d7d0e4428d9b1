"""Sim-to-real translation of tactile images with conditional GANs."""
from ._networks import UNetGenerator, PatchDiscriminator, init_weights
from ._losses import generator_loss, discriminator_loss, translator_loss
from ._training import (
    VARIANTS, TranslatorConfig, TranslatorCheckpoint, build_generator,
    build_discriminator, scale_shear, predict_images, train_translator)
from ._evaluation import (
    generator_forward, discriminator_forward, Translator, TrainedTranslator,
    IdentityTranslator, PassthroughTranslator, TranslationMetrics,
    eval_translation, format_translation_table)


__all__ = [
    "UNetGenerator", "PatchDiscriminator", "init_weights",
    "generator_loss", "discriminator_loss", "translator_loss",
    "VARIANTS", "TranslatorConfig", "TranslatorCheckpoint", "build_generator",
    "build_discriminator", "scale_shear", "predict_images",
    "train_translator", "generator_forward", "discriminator_forward",
    "Translator", "TrainedTranslator", "IdentityTranslator",
    "PassthroughTranslator", "TranslationMetrics", "eval_translation",
    "format_translation_table"]
