"""Figures of task logs, translated images and estimator errors.

Figures are rendered off-screen with the Agg canvas. PNG files carry no
software metadata, so that plotting the same data twice produces identical
files.
"""
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from mpl_toolkits import mplot3d  # noqa: F401, registers the 3d projection

from .servo import TaskLog
from .utils import rotation_z


LEADER_COLOR = "r"
FOLLOWER_COLOR = "b"
DPI = 100


def _figure(figsize):
    figure = Figure(figsize=figsize, dpi=DPI)
    FigureCanvasAgg(figure)
    return figure


def save_figure(figure, filename):
    """Store a figure as PNG without metadata that changes between runs.

    Parameters
    ----------
    figure : matplotlib.figure.Figure
        Figure.

    filename : str or Path
        Output file.
    """
    figure.savefig(str(filename), format="png", dpi=DPI,
                   metadata={"Software": None})


def target_positions(log):
    """Positions of the leader-carried target.

    Parameters
    ----------
    log : TaskLog
        Task log.

    Returns
    -------
    targets : array, shape (n_cycles, 3)
        Leader poses composed with the contact offset.
    """
    leader = log.leader_poses()
    offset = log.contact_offset.position
    return leader[:, :3] + np.array(
        [np.dot(rotation_z(yaw), offset) for yaw in leader[:, 3]]
    ).reshape(-1, 3)


def plot_trajectory(ax, log, lw=2):
    """Plot leader target and follower positions of a task log.

    Parameters
    ----------
    ax : Matplotlib 3d axis
        A matplotlib 3d axis.

    log : TaskLog
        Task log.

    lw : int, optional (default: 2)
        Line width.
    """
    targets = target_positions(log)
    follower = log.follower_poses()
    ax.plot(targets[:, 0], targets[:, 1], targets[:, 2], c=LEADER_COLOR,
            lw=lw, label="leader")
    ax.plot(follower[:, 0], follower[:, 1], follower[:, 2],
            c=FOLLOWER_COLOR, lw=lw, label="follower")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_zlabel("z [mm]")
    error = log.tracking_error()
    ax.set_title("error=$%.2f\\pm%.2f$" % (error.mean, error.std))
    ax.legend(loc="upper right")


def plot_trajectories(task_log, output_path):
    """Plot a task log to a PNG file.

    Parameters
    ----------
    task_log : TaskLog, str or Path
        Task log or JSON lines file.

    output_path : str or Path
        Output file.
    """
    if not isinstance(task_log, TaskLog):
        task_log = TaskLog.load(task_log)
    figure = _figure((5, 5))
    ax = figure.add_subplot(111, projection="3d")
    plot_trajectory(ax, task_log)
    save_figure(figure, output_path)


def resting_underlay(image, resting):
    """Gray image with the undeformed marker image underlaid in red.

    Parameters
    ----------
    image : array, shape (H, W)
        Tactile image.

    resting : array, shape (H, W)
        Undeformed marker image.

    Returns
    -------
    rgb : array, shape (H, W, 3)
        Color image.
    """
    image = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    resting = np.clip(np.asarray(resting, dtype=np.float64), 0.0, 1.0)
    rgb = np.dstack((image, image, image))
    rgb[:, :, 0] = np.maximum(image, resting)
    return rgb


def plot_comparison_grid(columns, resting, output_path, labels=None):
    """Side-by-side images of several sources, one row per sample.

    Parameters
    ----------
    columns : dict
        Image arrays of shape (n_samples, H, W) by column title, e.g.,
        sim, pix2pix, shPix2pix and real.

    resting : array, shape (H, W)
        Undeformed marker image, underlaid in red.

    output_path : str or Path
        Output file.

    labels : list of str, optional (default: None)
        Row titles.
    """
    titles = list(columns)
    n_rows = len(next(iter(columns.values())))
    figure = _figure((2 * len(titles), 2 * n_rows))
    for row in range(n_rows):
        for col, title in enumerate(titles):
            ax = figure.add_subplot(n_rows, len(titles),
                                    row * len(titles) + col + 1)
            ax.imshow(resting_underlay(columns[title][row], resting),
                      interpolation="nearest")
            ax.set_xticks([])
            ax.set_yticks([])
            if row == 0:
                ax.set_title(title)
            if col == 0 and labels is not None:
                ax.set_ylabel(labels[row])
    figure.tight_layout()
    save_figure(figure, output_path)


def plot_estimator_errors(reports, output_path):
    """Bar chart of the mean absolute error per label component.

    Parameters
    ----------
    reports : dict
        EstimatorReport by estimator name. The baseline of the last report
        is drawn as an additional bar.

    output_path : str or Path
        Output file.
    """
    if not reports:
        raise ValueError("No reports to plot")
    names = list(reports.values())[-1].names
    bars = [(name, report.mae) for name, report in reports.items()]
    bars.append(("baseline", list(reports.values())[-1].baseline_mae))
    width = 0.8 / len(bars)
    positions = np.arange(len(names))
    figure = _figure((1.5 * len(names) + 2, 4))
    ax = figure.add_subplot(111)
    for i, (label, values) in enumerate(bars):
        ax.bar(positions + (i - 0.5 * (len(bars) - 1)) * width, values,
               width=width, label=label)
    ax.set_xticks(positions)
    ax.set_xticklabels(names)
    ax.set_ylabel("MAE [mm or deg]")
    ax.legend()
    figure.tight_layout()
    save_figure(figure, output_path)
