import tempfile
import dataclasses
import numpy as np
from sheartac.benchmark import Timer
from sheartac.dataset import CollectionConfig, collect_dataset
from sheartac.estimate import (
    EstimatorConfig, train_estimator, eval_estimator, format_estimator_table)
from sheartac.translate import (
    TranslatorConfig, train_translator, eval_translation,
    format_translation_table)


timer = Timer()
output_dir = tempfile.mkdtemp(prefix="sheartac-")
config = CollectionConfig.preset("desk", seed=0, n_jobs=4)
with timer.measure("collect"):
    manifest = collect_dataset(config, output_dir, verbose=True)

checkpoints = {}
metrics = {}
for variant in ("pix2pix", "shpix2pix"):
    with timer.measure(variant):
        checkpoints[variant] = train_translator(
            manifest, TranslatorConfig(variant=variant), verbose=True)
    metrics[variant] = eval_translation(checkpoints[variant], manifest)
print(format_translation_table(list(metrics.values())))

for row in ("edge", "surface"):
    pix2pix = metrics["pix2pix"].rows[row]
    shpix2pix = metrics["shpix2pix"].rows[row]
    print(f"{row}: MAPE ratio {shpix2pix['mape'] / pix2pix['mape']:.3f} "
          f"(<= 0.5), SSIM {shpix2pix['ssim']:.4f} > {pix2pix['ssim']:.4f}: "
          f"{shpix2pix['ssim'] > pix2pix['ssim']}")

reports = {}
for variant, checkpoint in checkpoints.items():
    estimator_config = dataclasses.replace(
        EstimatorConfig(), training_image_source=variant)
    with timer.measure("%s estimator" % variant):
        estimator = train_estimator(manifest, checkpoint, estimator_config,
                                    verbose=True)
    reports[variant] = eval_estimator(estimator, manifest)
print(format_estimator_table(reports))

for variant, report in reports.items():
    shear = slice(2, 4)
    pose = slice(0, 2)
    shear_ratio = report.mae[shear] / report.baseline_mae[shear]
    pose_ratio = report.baseline_mae[pose] / report.mae[pose]
    print(f"{variant}: shear MAE {np.round(report.mae[shear], 3)}, "
          f"relative to baseline {np.round(shear_ratio, 3)}, "
          f"pose improvement over baseline {np.round(pose_ratio, 2)}")

for name, total in timer.total_time_.items():
    print(f"{name}: {total:.1f} s")
