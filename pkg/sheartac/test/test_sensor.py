from pathlib import Path

import numpy as np
import pytest
from scipy.ndimage import maximum_filter
from sheartac.contact import SensorGeometry, DepthImage, render_depth
from sheartac.errors import ConfigurationError, DatasetError
from sheartac.metrics import mape
from sheartac.pose import Pose4, ShearVector
from sheartac.sensor import (
    TactileImage, MarkerGrid, MarkerGridConfig, MembraneParams,
    sim_tactile_image, marker_displacement_field, render_markers,
    resting_template, real_tactile_oracle, save_png, load_png)
from sheartac.shapes import HalfSpace
from numpy.testing import assert_array_almost_equal, assert_array_equal
from pytest import approx


DATA_DIR = Path(__file__).parent / "data"
GEOM = SensorGeometry()
PARAMS = MembraneParams()


def _central_contact(depth_mm=1.0, geom=GEOM):
    return render_depth(Pose4(z=geom.tip_radius - depth_mm), HalfSpace(),
                        geom)


def test_tactile_image_validation():
    with pytest.raises(ValueError):
        TactileImage(np.full((4, 4), 1.5), "sim")
    with pytest.raises(ValueError):
        TactileImage(np.zeros((4, 4)), "photo")


def test_sim_image_examples():
    zero = DepthImage.zeros(GEOM)
    assert_array_equal(sim_tactile_image(zero).values, 0.0)

    full = DepthImage(np.full((64, 64), GEOM.max_depth), GEOM.max_depth)
    assert_array_equal(sim_tactile_image(full).values, 1.0)

    image = sim_tactile_image(_central_contact())
    assert image.domain == "sim"
    assert image.values.max() == image.values[32, 32]
    assert_array_almost_equal(image.values, image.values[::-1])
    assert_array_almost_equal(image.values, image.values.T)


def test_hexagonal_grid():
    grid = MarkerGrid.hexagonal()
    assert grid.n_markers == 331
    assert np.all(np.abs(grid.positions) <= 10.0)
    assert_array_almost_equal(np.mean(grid.positions, axis=0), [0.0, 0.0])
    spacing = np.min(np.linalg.norm(
        grid.positions[1:] - grid.positions[0], axis=1))
    assert spacing > 2.0 * grid.blob_sigma


def test_hexagonal_grid_requires_hexagonal_number():
    with pytest.raises(ConfigurationError):
        MarkerGrid.hexagonal(n_markers=300)
    with pytest.raises(ConfigurationError):
        MarkerGrid.hexagonal(n_markers=331, blob_sigma=0.5)


def test_marker_grid_config():
    grid = MarkerGridConfig(n_markers=19, blob_sigma=1.0).build(GEOM)
    assert grid.n_markers == 19
    assert grid.aperture == GEOM.sensing_aperture


def test_displacement_without_contact():
    grid = MarkerGrid.hexagonal()
    positions, scales = marker_displacement_field(
        DepthImage.zeros(GEOM), ShearVector(1.0, 2.0, 0.3, 5.0), grid, PARAMS,
        GEOM)
    assert_array_equal(positions, grid.positions)
    assert_array_equal(scales, grid.blob_sigma)


def test_displacement_without_shear_is_gradient_term():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    positions, scales = marker_displacement_field(
        depth, ShearVector(), grid, PARAMS, GEOM)
    positions_no_bulge, _ = marker_displacement_field(
        depth, ShearVector(), grid,
        MembraneParams(alpha=0.0), GEOM)
    assert_array_equal(positions_no_bulge, grid.positions)
    assert np.any(np.linalg.norm(positions - grid.positions, axis=1) > 0.01)
    assert_array_equal(scales, grid.blob_sigma)


def test_pure_lateral_shear_direction():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    rest, _ = marker_displacement_field(
        depth, ShearVector(), grid, PARAMS, GEOM)
    sheared, _ = marker_displacement_field(
        depth, ShearVector(2.0, 0.0, 0.0, 0.0), grid, PARAMS, GEOM)
    displacement = sheared - grid.positions
    net = np.sum(displacement, axis=0)
    assert net[0] > 0.0
    assert abs(np.degrees(np.arctan2(net[1], net[0]))) < 1.0
    # the shear term only acts in +x
    assert np.all((sheared - rest)[:, 0] >= 0.0)
    assert_array_almost_equal((sheared - rest)[:, 1], 0.0)


def test_displacement_linear_in_shear():
    grid = MarkerGrid.hexagonal()
    depth = render_depth(Pose4(1.0, -2.0, 8.5), HalfSpace(), GEOM)
    s1 = ShearVector(0.7, -0.2, 0.0, 4.0)
    s2 = ShearVector(-1.1, 0.9, 0.0, -7.0)
    u0, _ = marker_displacement_field(depth, ShearVector(), grid, PARAMS, GEOM)
    u1, _ = marker_displacement_field(depth, s1, grid, PARAMS, GEOM)
    u2, _ = marker_displacement_field(depth, s2, grid, PARAMS, GEOM)
    u12, _ = marker_displacement_field(depth, s1 + s2, grid, PARAMS, GEOM)
    assert np.max(np.abs((u12 - u0) - ((u1 - u0) + (u2 - u0)))) < 1e-9


def test_vertical_shear_scales_blobs():
    grid = MarkerGrid.hexagonal()
    _, scales = marker_displacement_field(
        _central_contact(), ShearVector(sz=0.5), grid, PARAMS, GEOM)
    assert np.all(scales >= grid.blob_sigma)
    assert np.max(scales) > grid.blob_sigma


def test_render_markers_empty():
    image = render_markers(np.zeros((0, 2)), np.zeros(0), GEOM)
    assert_array_equal(image.values, 0.0)
    assert image.domain == "real_synthetic"


def test_render_single_blob_symmetry():
    geom = SensorGeometry(image_size=33, sensing_aperture=33.0)
    image = render_markers(np.zeros((1, 2)), 2.0, geom).values
    assert np.unravel_index(np.argmax(image), image.shape) == (16, 16)
    assert_array_almost_equal(image, np.rot90(image))
    assert_array_almost_equal(image, image[::-1])


def test_render_markers_local_maxima():
    geom = SensorGeometry(image_size=101)
    grid = MarkerGrid.hexagonal(n_markers=37, blob_sigma=0.3)
    image = render_markers(grid.positions, grid.blob_sigma, geom).values
    peaks = (image == maximum_filter(image, size=3)) & (image > 0.1)
    assert np.count_nonzero(peaks) == grid.n_markers


def test_render_markers_noise():
    grid = MarkerGrid.hexagonal()
    clean = render_markers(grid.positions, grid.blob_sigma, GEOM)
    noisy = render_markers(grid.positions, grid.blob_sigma, GEOM,
                           noise_amplitude=0.05, seed=3)
    again = render_markers(grid.positions, grid.blob_sigma, GEOM,
                           noise_amplitude=0.05, seed=3)
    assert 0.0 < np.max(np.abs(noisy.values - clean.values)) <= 0.05 + 1e-12
    assert_array_equal(noisy.values, again.values)


def test_resting_template():
    grid = MarkerGrid.hexagonal()
    template = resting_template(grid, GEOM)
    assert template is resting_template(grid, GEOM)
    assert not template.values.flags.writeable
    oracle = real_tactile_oracle(
        DepthImage.zeros(GEOM), ShearVector(2.0, 1.0, 0.3, 5.0), grid,
        PARAMS, GEOM)
    assert_array_equal(oracle.values, template.values)
    assert 0.0 < template.values.max() < 1.0


def test_resting_template_matches_stored_fixture():
    template = resting_template(MarkerGrid.hexagonal(), GEOM)
    stored = load_png(DATA_DIR / "resting_template.png")
    assert_array_equal(stored, np.round(255.0 * template.values) / 255.0)


def test_resting_template_survives_png(tmp_path):
    grid = MarkerGrid.hexagonal()
    template = resting_template(grid, GEOM)
    filename = tmp_path / "resting.png"
    save_png(filename, template)
    stored = load_png(filename)
    assert np.max(np.abs(stored - template.values)) <= 0.5 / 255 + 1e-12
    save_png(tmp_path / "again.png", TactileImage(stored, "real_synthetic"))
    assert (tmp_path / "again.png").read_bytes() == filename.read_bytes()


def test_load_png_corrupted(tmp_path):
    filename = tmp_path / "broken.png"
    filename.write_bytes(b"not an image")
    with pytest.raises(DatasetError):
        load_png(filename)


def test_oracle_deterministic():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    shear = ShearVector(1.0, -0.5, 0.2, 3.0)
    a = real_tactile_oracle(depth, shear, grid, PARAMS, GEOM)
    b = real_tactile_oracle(depth, shear, grid, PARAMS, GEOM)
    assert a.values.tobytes() == b.values.tobytes()


def test_oracle_mirror_symmetry():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    right = real_tactile_oracle(
        depth, ShearVector(1.0, 0.0, 0.0, 0.0), grid, PARAMS, GEOM)
    left = real_tactile_oracle(
        depth, ShearVector(-1.0, 0.0, 0.0, 0.0), grid, PARAMS, GEOM)
    assert_array_almost_equal(right.values, left.values[:, ::-1])


def test_oracle_distinguishes_shear():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    reference = real_tactile_oracle(depth, ShearVector(), grid, PARAMS, GEOM)
    for shear in (ShearVector(sx=1.0), ShearVector(sy=-1.0),
                  ShearVector(syaw=10.0)):
        image = real_tactile_oracle(depth, shear, grid, PARAMS, GEOM)
        assert mape(image, reference) >= 1e-3
    image = real_tactile_oracle(
        depth, ShearVector(sz=0.5), grid, PARAMS, GEOM)
    assert mape(image, reference) > 0.0


def test_oracle_error_grows_with_shear():
    grid = MarkerGrid.hexagonal()
    depth = _central_contact()
    reference = real_tactile_oracle(depth, ShearVector(), grid, PARAMS, GEOM)
    errors = [
        mape(real_tactile_oracle(depth, ShearVector(sx=m, sy=0.5 * m), grid,
                                 PARAMS, GEOM), reference)
        for m in (0.2, 0.4, 0.6, 0.8, 1.0)]
    assert np.all(np.diff(errors) > 0.0)


def test_sim_image_is_shear_blind():
    depth = _central_contact()
    assert_array_equal(sim_tactile_image(depth).values,
                       sim_tactile_image(depth).values)
    assert sim_tactile_image(depth).values.max() == approx(
        depth.values.max() / GEOM.max_depth)
