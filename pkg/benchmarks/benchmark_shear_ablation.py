from sheartac.errors import ContactLostError
from sheartac.servo import ServoGains, TaskConfig, TrajectorySpec, run_task


n_runs = 10
trajectory = TrajectorySpec(name="circle", scale=30.0)
quarter_period = trajectory.n_steps // 4

lost_early = 0
for seed in range(n_runs):
    config = TaskConfig(trajectory=trajectory,
                        gains=ServoGains(k_shear_xy=0.0),
                        noise_amplitude=0.02, seed=seed)
    try:
        error, _ = run_task(config)
        print(f"seed {seed}: kept contact, {error}")
    except ContactLostError as e:
        print(f"seed {seed}: lost contact in step {e.step}")
        lost_early += e.step < quarter_period
print(f"lost contact within the first quarter period in {lost_early} of "
      f"{n_runs} runs")
