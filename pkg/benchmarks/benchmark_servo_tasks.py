import sys
import numpy as np
from tabulate import tabulate
from sheartac.benchmark import Timer
from sheartac.errors import ContactLostError
from sheartac.servo import TaskConfig, TrajectorySpec, run_task


# estimator checkpoint, the oracle labels are used without one
estimator = sys.argv[1] if len(sys.argv) > 1 else "oracle"
tasks = [
    ("tracking", "circle", 0.0, 2.0),
    ("tracking", "square", 0.0, 2.0),
    ("tracking", "spiral", 0.0, 2.0),
    ("tracking", "loop", 0.0, 3.0),
    ("colift", "wave", 0.5, 2.5),
    ("colift", "star", 0.5, 2.5),
]

timer = Timer()
rows = []
for task, trajectory, bias, bound in tasks:
    config = TaskConfig(task=task, trajectory=TrajectorySpec(name=trajectory),
                        gravity_shear_bias=bias, estimator=estimator)
    try:
        with timer.measure(trajectory):
            error, _ = run_task(config)
        rows.append([task, trajectory, f"{error.mean:.2f}",
                     f"{error.std:.2f}", error.mean <= bound,
                     f"{timer.total_time_[trajectory]:.1f}"])
    except ContactLostError as e:
        rows.append([task, trajectory, "lost contact", str(e), False,
                     f"{timer.total_time_[trajectory]:.1f}"])
print(tabulate(rows, headers=["task", "trajectory", "mean [mm]", "std [mm]",
                              "within bound", "time [s]"]))

means = {row[1]: row[2] for row in rows}
if "lost contact" not in (means["loop"], means["circle"]):
    print(f"loop >= circle: {float(means['loop']) >= float(means['circle'])}")
print(f"mean over tasks: {np.mean([float(m) for m in means.values() if m != 'lost contact']):.2f}")
