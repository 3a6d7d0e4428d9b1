import numpy as np
import pytest
import torch
from sheartac.contact import SensorGeometry
from sheartac.dataset import CollectionConfig, collect_dataset, load_arrays
from sheartac.errors import (
    ConfigurationError, DatasetError, TrainingDivergedError)
from sheartac.metrics import mape
from sheartac.pose import ShearVector
from sheartac.sensor import MarkerGridConfig, TactileImage
from sheartac.translate import (
    UNetGenerator, PatchDiscriminator, TranslatorConfig, TranslatorCheckpoint,
    build_generator, build_discriminator, init_weights, translator_loss,
    train_translator, generator_forward, discriminator_forward,
    TrainedTranslator, IdentityTranslator, PassthroughTranslator,
    eval_translation, format_translation_table)
from numpy.testing import assert_array_equal, assert_array_almost_equal
from pytest import approx


SMALL = dict(image_size=32, encoder_channels=(8, 16, 32, 32),
             discriminator_channels=(8, 16, 32))


@pytest.fixture(scope="module")
def manifest(tmp_path_factory):
    config = CollectionConfig(
        n_train=6, n_val=3, seed=1, geometry=SensorGeometry(image_size=32),
        markers=MarkerGridConfig(n_markers=91, blob_sigma=0.3))
    return collect_dataset(config, tmp_path_factory.mktemp("dataset"))


def _checkpoint(variant, seed=0):
    config = TranslatorConfig(variant=variant, shear_scale=(3, 3, 0.5, 10),
                              seed=seed, **SMALL)
    torch.manual_seed(seed)
    generator = build_generator(config)
    discriminator = build_discriminator(config)
    init_weights(generator)
    init_weights(discriminator)
    return TranslatorCheckpoint(config, generator.state_dict(),
                                discriminator.state_dict())


def test_translator_config_invariants():
    assert TranslatorConfig().shear_input_dim == 4
    assert TranslatorConfig(variant="pix2pix").shear_input_dim == 0
    with pytest.raises(ConfigurationError):
        TranslatorConfig(variant="pix2pix", shear_input_dim=4)
    with pytest.raises(ConfigurationError):
        TranslatorConfig(variant="shpix2pix", shear_input_dim=0)
    with pytest.raises(ConfigurationError):
        TranslatorConfig(variant="cyclegan")
    with pytest.raises(ConfigurationError):
        TranslatorConfig(image_size=40)
    with pytest.raises(ConfigurationError):
        TranslatorConfig(adversarial_weight=-1.0)


def test_generator_output_range_and_shape():
    generator = UNetGenerator(32, (8, 16, 32, 32), shear_dim=4).eval()
    sim = torch.rand(3, 1, 32, 32)
    shear = torch.rand(3, 4) * 2.0 - 1.0
    generated = generator(sim, shear)
    assert generated.shape == (3, 1, 32, 32)
    assert torch.all(generated >= 0.0) and torch.all(generated <= 1.0)
    assert torch.equal(generated, generator(sim, shear))


def test_generator_shear_argument():
    conditioned = UNetGenerator(32, (8, 16, 32, 32), shear_dim=4)
    plain = UNetGenerator(32, (8, 16, 32, 32))
    sim = torch.rand(2, 1, 32, 32)
    with pytest.raises(ConfigurationError):
        conditioned(sim)
    with pytest.raises(ConfigurationError):
        plain(sim, torch.zeros(2, 4))


def test_generator_bottleneck_width():
    generator = UNetGenerator(32, (8, 16, 32, 32), shear_dim=4)
    assert generator.bottleneck_shape == (32, 2, 2)
    assert generator.bottleneck[0].in_features == 32 * 2 * 2 + 4
    assert generator.bottleneck[0].out_features == 32 * 2 * 2
    narrow = UNetGenerator(32, (8, 16, 32, 32), shear_dim=4, fc_width=16)
    assert narrow.bottleneck[-2].out_features == 32 * 2 * 2


def test_discriminator_score_map():
    discriminator = PatchDiscriminator((8, 16, 32)).eval()
    sim = torch.rand(2, 1, 32, 32)
    candidate = torch.rand(2, 1, 32, 32)
    scores = discriminator(sim, candidate)
    assert scores.shape == (2, 1, 4, 4)
    assert torch.all(torch.isfinite(scores))
    swapped = discriminator(sim.flip(0), candidate.flip(0))
    assert torch.allclose(swapped.flip(0), scores, atol=1e-6)
    with pytest.raises(ValueError):
        discriminator(sim, torch.rand(2, 1, 16, 16))


def test_translator_loss_vanishes():
    real = torch.rand(2, 1, 4, 4)
    ones = torch.ones(2, 1, 2, 2)
    g_loss, _ = translator_loss(real.clone(), real, (ones, ones),
                                TranslatorConfig())
    assert g_loss.item() == 0.0


def test_translator_loss_without_adversarial_term():
    generated = torch.rand(2, 1, 4, 4)
    real = torch.rand(2, 1, 4, 4)
    scores = torch.rand(2, 1, 2, 2)
    config = TranslatorConfig(adversarial_weight=0.0)
    g_loss, _ = translator_loss(generated, real, (scores, scores), config)
    expected = 100.0 * torch.mean(torch.abs(generated - real))
    assert g_loss.item() == approx(expected.item(), rel=1e-6)


def test_translator_loss_hand_computed():
    generated = torch.tensor([[0.2, 0.4], [0.6, 0.8]], dtype=torch.float64)
    real = torch.tensor([[0.0, 0.5], [1.0, 0.5]], dtype=torch.float64)
    scores_real = torch.tensor(0.8, dtype=torch.float64)
    scores_fake = torch.tensor(0.5, dtype=torch.float64)
    g_loss, d_loss = translator_loss(
        generated, real, (scores_real, scores_fake), TranslatorConfig())
    assert g_loss.item() == approx(100.0 * 0.25 + 0.25, abs=1e-6)
    assert d_loss.item() == approx(0.5 * 0.04 + 0.5 * 0.25, abs=1e-6)


def test_translator_loss_gradient():
    random_state = np.random.RandomState(0)
    real = torch.tensor(random_state.rand(2, 2))
    # keep generated pixels away from the kink of the absolute error
    generated = (real + torch.tensor([[0.3, -0.2], [0.25, -0.35]])) \
        .requires_grad_(True)
    scores = (torch.tensor(0.7, dtype=torch.float64),
              torch.tensor(0.4, dtype=torch.float64))
    config = TranslatorConfig()
    assert torch.autograd.gradcheck(
        lambda g: translator_loss(g, real, scores, config)[0], (generated,),
        eps=1e-6, atol=1e-6, rtol=1e-4)


def test_generator_forward_requires_matching_shear():
    sim = TactileImage(np.zeros((32, 32)), "sim")
    with pytest.raises(ConfigurationError):
        generator_forward(sim, None, _checkpoint("shpix2pix"))
    with pytest.raises(ConfigurationError):
        generator_forward(sim, ShearVector(1.0), _checkpoint("pix2pix"))
    with pytest.raises(ValueError):
        generator_forward(TactileImage(np.zeros((16, 16)), "sim"),
                          ShearVector(), _checkpoint("shpix2pix"))


def test_generator_forward_matches_trained_translator():
    checkpoint = _checkpoint("shpix2pix")
    random_state = np.random.RandomState(1)
    sim = TactileImage(random_state.rand(32, 32), "sim")
    shear = ShearVector(1.0, -2.0, 0.1, 5.0)
    image = generator_forward(sim, shear, checkpoint)
    assert image.domain == "generated"
    assert_array_almost_equal(
        image.values, TrainedTranslator(checkpoint).translate(sim, shear).values)
    assert_array_equal(image.values,
                       generator_forward(sim, shear, checkpoint).values)
    assert checkpoint.generator() is checkpoint.generator()


def test_pix2pix_is_shear_blind():
    translator = TrainedTranslator(_checkpoint("pix2pix"))
    random_state = np.random.RandomState(2)
    sim = random_state.rand(2, 32, 32)
    a = translator.translate_batch(sim, np.zeros((2, 4)), sim)
    b = translator.translate_batch(
        sim, np.array([[3.0, 0.0, 0.0, 0.0], [0.0, -3.0, 0.5, 10.0]]), sim)
    assert_array_equal(a, b)


def test_discriminator_forward():
    checkpoint = _checkpoint("pix2pix")
    sim = TactileImage(np.zeros((32, 32)), "sim")
    scores = discriminator_forward(sim, sim, checkpoint)
    assert scores.shape == (4, 4)
    assert checkpoint.discriminator() is checkpoint.discriminator()
    assert np.all(np.isfinite(scores))


def test_train_translator_one_epoch(manifest, tmp_path):
    config = TranslatorConfig(epochs=1, batch_size=4, **SMALL)
    checkpoint = train_translator(manifest, config)
    assert checkpoint.best_epoch == 1
    assert len(checkpoint.curves) == 1
    assert checkpoint.config.shear_scale == (3.0, 3.0, 0.5, 10.0)
    assert np.isfinite(checkpoint.curves[0]["val_mape"])

    filename = tmp_path / "translator.pt"
    checkpoint.save(filename)
    loaded = TranslatorCheckpoint.load(filename)
    assert loaded.config == checkpoint.config
    arrays = load_arrays(manifest, "val")
    assert_array_equal(
        TrainedTranslator(loaded).translate_batch(
            arrays["sim"], arrays["shear"], arrays["real"]),
        TrainedTranslator(checkpoint).translate_batch(
            arrays["sim"], arrays["shear"], arrays["real"]))


def test_train_translator_is_deterministic(manifest):
    config = TranslatorConfig(variant="pix2pix", epochs=1, batch_size=4,
                              **SMALL)
    a = train_translator(manifest, config)
    b = train_translator(manifest, config)
    for key, value in a.generator_state.items():
        assert torch.equal(value, b.generator_state[key])


def test_train_translator_image_size_mismatch(manifest):
    with pytest.raises(ConfigurationError):
        train_translator(manifest, TranslatorConfig(epochs=1))


def test_train_translator_divergence_guard(manifest, monkeypatch):
    def diverged(*args):
        return torch.tensor(float("nan"), requires_grad=True)
    monkeypatch.setattr(
        "sheartac.translate._training.generator_loss", diverged)
    with pytest.raises(TrainingDivergedError):
        train_translator(manifest, TranslatorConfig(epochs=1, **SMALL))


def test_checkpoint_load_rejects_other_files(tmp_path):
    filename = tmp_path / "other.pt"
    torch.save({"format": "something-else"}, filename)
    with pytest.raises(ConfigurationError):
        TranslatorCheckpoint.load(filename)


def test_eval_identity_translator(manifest):
    metrics = eval_translation(IdentityTranslator(), manifest, "val")
    assert metrics.variant == "identity"
    assert set(metrics.rows) == {"edge", "surface", "overall"}
    for row in metrics.rows.values():
        assert row["mape"] == 0.0
        assert row["ssim"] == approx(1.0)
    assert metrics.rows["overall"]["n"] == 3


def test_eval_passthrough_translator(manifest):
    metrics = eval_translation(PassthroughTranslator(), manifest, "val")
    arrays = load_arrays(manifest, "val")
    expected = np.mean([mape(s, r)
                        for s, r in zip(arrays["sim"], arrays["real"])])
    assert metrics.rows["overall"]["mape"] == approx(expected)
    assert metrics.rows["overall"]["mape"] > 0.0


def test_eval_empty_split(tmp_path):
    config = CollectionConfig(
        n_train=1, n_val=0, geometry=SensorGeometry(image_size=32),
        markers=MarkerGridConfig(n_markers=91, blob_sigma=0.3))
    manifest = collect_dataset(config, tmp_path)
    with pytest.raises(DatasetError):
        eval_translation(IdentityTranslator(), manifest, "val")


def test_translation_table(manifest):
    table = format_translation_table([
        eval_translation(PassthroughTranslator(), manifest, "val"),
        eval_translation(IdentityTranslator(), manifest, "val")])
    lines = table.splitlines()
    assert "Edge MAPE" in lines[0] and "Surface SSIM" in lines[0]
    assert "Overall MAPE" in lines[0]
    assert lines[-1].startswith("| identity")
    assert "0.000" in lines[-1] and "1.000" in lines[-1]
