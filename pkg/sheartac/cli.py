"""Command line interface of the sim-to-real pipeline.

Every command resolves its configuration from preset, configuration file,
``--set`` overrides and flags, writes into a fresh run directory and
records the resolved configuration in ``run.json``.
"""
import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import Timer
from .config import PRESETS, load_config, new_run_dir, write_run_manifest
from .dataset import as_manifest, collect_dataset, load_arrays
from .errors import ConfigurationError, DatasetError, SheartacError
from .estimate import (
    IMAGE_SOURCES, OracleEstimator, TrainedEstimator, compare_to_baseline,
    eval_estimator, format_estimator_table, train_estimator)
from .io import save_curves, save_json
from .plotting import (
    plot_comparison_grid, plot_estimator_errors, plot_trajectories)
from .sensor import resting_template
from .servo import TASKS, TRAJECTORIES, TaskLog, run_task, run_tasks
from .shapes import CONTACT_TYPES
from .translate import (
    VARIANTS, IdentityTranslator, PassthroughTranslator, TrainedTranslator,
    eval_translation, format_translation_table, train_translator)


logger = logging.getLogger(__name__)


LOG_LEVEL_VARIABLE = "SHEARTAC_LOG_LEVEL"
EXIT_FAILURE = 1
EXIT_USAGE = 2

# task, trajectory and gravity shear bias of the reproduced servo runs
REPRODUCED_TASKS = (("tracking", "circle", 0.0), ("colift", "wave", 0.2))


def configure_logging(verbose=False, quiet=False):
    """Configure the root logger once per process.

    Parameters
    ----------
    verbose : bool, optional (default: False)
        Log debug messages.

    quiet : bool, optional (default: False)
        Log only warnings and errors.
    """
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        name = os.environ.get(LOG_LEVEL_VARIABLE, "INFO").upper()
        level = getattr(logging, name, None)
        if not isinstance(level, int):
            raise ConfigurationError(
                "%s=%s is not a log level" % (LOG_LEVEL_VARIABLE, name))
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True)


def _common_arguments():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=str, default=None,
                        help="YAML configuration file.")
    parser.add_argument("--preset", type=str, choices=sorted(PRESETS),
                        default=None, help="Preset of the configuration.")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="SECTION.KEY=VALUE",
                        help="Override a configuration value.")
    parser.add_argument("--seed", type=int, default=None,
                        help="Seed of all random number generators.")
    parser.add_argument("--output", type=str, default=None,
                        help="Run directory, must not exist.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true",
                           help="Log debug messages and show progress.")
    verbosity.add_argument("-q", "--quiet", action="store_true",
                           help="Log only warnings and errors.")
    return parser


def build_parser():
    """Argument parser with one subcommand per pipeline stage."""
    common = _common_arguments()
    parser = argparse.ArgumentParser(
        prog="sheartac",
        description="Sim-to-real translation of tactile images with shear "
                    "and tactile servoing with the translated estimators.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command", metavar="command")

    collect = commands.add_parser(
        "collect", parents=[common], help="Collect a paired dataset.")
    collect.add_argument("--n-train", type=int, default=None)
    collect.add_argument("--n-val", type=int, default=None)
    collect.add_argument("--n-jobs", type=int, default=None)
    collect.set_defaults(run=_collect, flag_map={
        "n_train": "dataset.n_train", "n_val": "dataset.n_val",
        "n_jobs": "dataset.n_jobs"})

    translator = commands.add_parser(
        "train-translator", parents=[common],
        help="Train pix2pix or shPix2pix on a dataset.")
    translator.add_argument("dataset", type=str, help="Dataset manifest.")
    translator.add_argument("--variant", choices=VARIANTS,
                            default="shpix2pix")
    translator.add_argument("--epochs", type=int, default=None)
    translator.set_defaults(run=_train_translator,
                            flag_map={"epochs": "translator.epochs"})

    estimator = commands.add_parser(
        "train-estimator", parents=[common],
        help="Train a Gaussian-density network on translated images.")
    estimator.add_argument("dataset", type=str, help="Dataset manifest.")
    estimator.add_argument("--source", choices=IMAGE_SOURCES, default=None,
                           help="Images the network is trained on.")
    estimator.add_argument("--translator", type=str, default=None,
                           help="Translator checkpoint of the source.")
    estimator.add_argument("--epochs", type=int, default=None)
    estimator.set_defaults(run=_train_estimator, flag_map={
        "epochs": "estimator.epochs",
        "source": "estimator.training_image_source"})

    eval_translation_parser = commands.add_parser(
        "eval-translation", parents=[common],
        help="Compare translated with real images.")
    eval_translation_parser.add_argument("dataset", type=str)
    translators = eval_translation_parser.add_mutually_exclusive_group(
        required=True)
    translators.add_argument("--translator", type=str,
                             help="Translator checkpoint.")
    translators.add_argument("--identity", action="store_true",
                             help="Evaluate the real images themselves.")
    translators.add_argument("--passthrough", action="store_true",
                             help="Evaluate the simulated images.")
    eval_translation_parser.add_argument("--split", default="val")
    eval_translation_parser.set_defaults(run=_eval_translation, flag_map={})

    eval_estimator_parser = commands.add_parser(
        "eval-estimator", parents=[common],
        help="Evaluate an estimator on synthetic real images.")
    eval_estimator_parser.add_argument("dataset", type=str)
    estimators = eval_estimator_parser.add_mutually_exclusive_group(
        required=True)
    estimators.add_argument("--estimator", type=str,
                            help="Estimator checkpoint.")
    estimators.add_argument("--oracle", action="store_true",
                            help="Evaluate the true labels.")
    eval_estimator_parser.add_argument("--split", default="val")
    eval_estimator_parser.set_defaults(run=_eval_estimator, flag_map={})

    task = commands.add_parser(
        "run-task", parents=[common], help="Run a tracking or co-lift task.")
    task.add_argument("--task", choices=TASKS, default=None)
    task.add_argument("--trajectory", choices=TRAJECTORIES, default=None)
    task.add_argument("--estimator", type=str, default=None,
                      help="Estimator checkpoint or 'oracle'.")
    task.add_argument("--gravity-bias", type=float, default=None,
                      help="Downward shear of the object's weight in mm.")
    task.set_defaults(run=_run_task, flag_map={
        "task": "task.task", "trajectory": "task.trajectory.name",
        "estimator": "task.estimator",
        "gravity_bias": "task.gravity_shear_bias"})

    plot = commands.add_parser(
        "plot", parents=[common], help="Plot leader and follower of a log.")
    plot.add_argument("task_log", type=str, help="Task log (JSON lines).")
    plot.set_defaults(run=_plot, flag_map={})

    reproduce = commands.add_parser(
        "reproduce", parents=[common],
        help="Run the whole pipeline and summarize the results.")
    reproduce.add_argument("--n-jobs", type=int, default=None)
    reproduce.add_argument("--translator-epochs", type=int, default=None)
    reproduce.add_argument("--estimator-epochs", type=int, default=None)
    reproduce.set_defaults(run=_reproduce, flag_map={
        "n_jobs": "dataset.n_jobs",
        "translator_epochs": "translator.epochs",
        "estimator_epochs": "estimator.epochs"})
    return parser


def _flags(args, extra=None):
    flags = {}
    if args.seed is not None:
        flags["seed"] = args.seed
    items = [(path, getattr(args, dest)) for dest, path in
             args.flag_map.items()]
    items.extend((extra or {}).items())
    for path, value in items:
        if value is None:
            continue
        node = flags
        keys = path.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    return flags


def _dataset_flags(manifest):
    """Image size of a collected dataset."""
    return {"dataset.geometry.image_size":
            manifest.config.geometry.image_size}


def _arguments(args):
    return {key: value for key, value in vars(args).items()
            if key not in ("run", "flag_map")}


def dispatch(argv):
    """Run a command.

    Parameters
    ----------
    argv : list of str
        Command line arguments without the program name.

    Returns
    -------
    exit_code : int
        0 on success, 1 if the pipeline failed and 2 for usage or
        configuration errors.
    """
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        configure_logging(args.verbose, args.quiet)
        extra = {}
        if hasattr(args, "dataset"):
            extra = _dataset_flags(as_manifest(args.dataset))
        config = load_config(args.config, args.preset, args.overrides,
                             _flags(args, extra))
        run_dir = new_run_dir(args.command,
                              args.output or config.output_dir)
        write_run_manifest(run_dir, args.command, config.to_dict(),
                           _arguments(args))
        logger.info("Writing %s results to '%s'", args.command, run_dir)
        args.run(args, config, run_dir)
    except ConfigurationError as e:
        print("sheartac %s: configuration error: %s" % (args.command, e),
              file=sys.stderr)
        return EXIT_USAGE
    except SheartacError as e:
        print("sheartac %s: %s: %s" % (args.command, type(e).__name__, e),
              file=sys.stderr)
        return EXIT_FAILURE
    return 0


def main(argv=None):
    """Entry point of the ``sheartac`` command."""
    if argv is None:
        argv = sys.argv[1:]
    return dispatch(argv)


def _collect(args, config, run_dir):
    collect_dataset(config.dataset, run_dir / "dataset", args.verbose)


def _train_translator(args, config, run_dir):
    translator_config = config.translator_for(args.variant)
    checkpoint = train_translator(args.dataset, translator_config,
                                  args.verbose)
    checkpoint.save(run_dir / "translator.pt")
    save_curves(checkpoint.curves, run_dir / "curves.csv")


def _train_estimator(args, config, run_dir):
    translator = args.translator
    if config.estimator.training_image_source == "real_synthetic":
        translator = None
    checkpoint = train_estimator(args.dataset, translator, config.estimator,
                                 args.verbose)
    checkpoint.save(run_dir / "estimator.pt")
    save_curves(checkpoint.curves, run_dir / "curves.csv")


def _eval_translation(args, config, run_dir):
    if args.identity:
        translator = IdentityTranslator()
    elif args.passthrough:
        translator = PassthroughTranslator()
    else:
        translator = TrainedTranslator(args.translator)
    metrics = eval_translation(translator, args.dataset, args.split)
    save_json(metrics.to_dict(), run_dir / "translation.json")
    print(format_translation_table([metrics]))


def _eval_estimator(args, config, run_dir):
    if args.oracle:
        estimator = OracleEstimator(label_dim=config.estimator.label_dim)
        name = "oracle"
    else:
        estimator = TrainedEstimator(args.estimator)
        name = Path(args.estimator).stem
    report = eval_estimator(estimator, args.dataset, args.split)
    save_json(_estimator_summary(report), run_dir / "estimator.json")
    plot_estimator_errors({name: report}, run_dir / "errors.png")
    print(format_estimator_table({name: report}))


def _estimator_summary(report):
    summary = report.to_dict()
    summary["baseline_tests"] = compare_to_baseline(report)
    return summary


def _run_task(args, config, run_dir):
    _, log = run_task(config.task, verbose=args.verbose)
    _save_task_log(log, run_dir, "task")


def _save_task_log(log, run_dir, name):
    log_file = run_dir / ("%s.jsonl" % name)
    log.save(log_file)
    plot_trajectories(log_file, run_dir / ("%s.png" % name))
    print("%s %s: %s" % (log.task, name, log.tracking_error()))


def _plot(args, config, run_dir):
    plot_trajectories(TaskLog.load(args.task_log), run_dir / "trajectory.png")


def translation_grid(manifest, checkpoints, n_per_type=1):
    """Image columns of a comparison figure.

    Parameters
    ----------
    manifest : DatasetManifest
        Dataset. Validation samples of every contact type are shown.

    checkpoints : dict
        Translator checkpoints by variant.

    n_per_type : int, optional (default: 1)
        Rows per contact type.

    Returns
    -------
    columns : dict
        Images of shape (n_rows, H, W) for sim, every variant and real.

    labels : list of str
        Contact type of every row.
    """
    arrays = load_arrays(manifest, "val")
    contact_types = np.array(arrays["contact_types"])
    indices = []
    for contact_type in CONTACT_TYPES:
        indices.extend(np.flatnonzero(
            contact_types == contact_type)[:n_per_type].tolist())
    if not indices:
        raise DatasetError("Validation split is empty")
    sim, shear, real = (arrays[key][indices]
                        for key in ("sim", "shear", "real"))
    columns = {"sim": sim}
    for variant, checkpoint in checkpoints.items():
        columns[variant] = TrainedTranslator(checkpoint).translate_batch(
            sim, shear, real)
    columns["real"] = real
    return columns, contact_types[indices].tolist()


def _reproduce(args, config, run_dir):
    timer = Timer()
    summary = {"preset": config.preset}

    with timer.measure("collect"):
        manifest = collect_dataset(config.dataset, run_dir / "dataset",
                                   args.verbose)
    summary["dataset"] = manifest.counts

    translators = {}
    translation_metrics = [eval_translation(PassthroughTranslator(),
                                            manifest)]
    for variant in ("pix2pix", "shpix2pix"):
        with timer.measure("train %s" % variant):
            checkpoint = train_translator(
                manifest, config.translator_for(variant), args.verbose)
        checkpoint.save(run_dir / ("%s.pt" % variant))
        save_curves(checkpoint.curves, run_dir / ("%s_curves.csv" % variant))
        translators[variant] = checkpoint
        translation_metrics.append(eval_translation(checkpoint, manifest))
    summary["translation"] = [m.to_dict() for m in translation_metrics]
    save_json(summary["translation"], run_dir / "translation.json")
    print(format_translation_table(translation_metrics))

    columns, labels = translation_grid(manifest, translators)
    grid = config.dataset.markers.build(config.dataset.geometry)
    resting = resting_template(grid, config.dataset.geometry).values
    plot_comparison_grid(columns, resting, run_dir / "translation_grid.png",
                         labels)

    reports = {}
    for variant, translator in translators.items():
        estimator_config = dataclasses.replace(
            config.estimator, training_image_source=variant)
        with timer.measure("train %s estimator" % variant):
            checkpoint = train_estimator(manifest, translator,
                                         estimator_config, args.verbose)
        checkpoint.save(run_dir / ("estimator_%s.pt" % variant))
        save_curves(checkpoint.curves,
                    run_dir / ("estimator_%s_curves.csv" % variant))
        reports[variant] = eval_estimator(checkpoint, manifest)
    summary["estimation"] = {name: _estimator_summary(report)
                             for name, report in reports.items()}
    save_json(summary["estimation"], run_dir / "estimator.json")
    plot_estimator_errors(reports, run_dir / "estimator_errors.png")
    print(format_estimator_table(reports))

    task_configs = _reproduced_task_configs(
        config.task, run_dir / "estimator_shpix2pix.pt")
    with timer.measure("tasks"):
        results = run_tasks(task_configs, config.dataset.n_jobs)
    summary["tasks"] = {}
    for task_config, (error, log) in zip(task_configs, results):
        name = "%s_%s" % (task_config.task, task_config.trajectory.name)
        _save_task_log(log, run_dir, name)
        summary["tasks"][name] = error.to_dict()

    save_json(summary, run_dir / "summary.json")
    save_json(timer.total_time_, run_dir / "timing.json")


def _reproduced_task_configs(task, estimator_path):
    configs = []
    for name, trajectory, bias in REPRODUCED_TASKS:
        configs.append(dataclasses.replace(
            task, task=name, shape=None, gravity_shear_bias=bias,
            estimator=str(estimator_path),
            trajectory=dataclasses.replace(task.trajectory, name=trajectory)))
    return configs


if __name__ == "__main__":
    sys.exit(main())
