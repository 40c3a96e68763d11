# %% [markdown]
# # Learning curves under impulsive noise
#
# A reduced-size version of the fig3 preset: K = 8 of N = 80 taps active,
# SNR = 10 dB, phi = 0.2, sigma2^2 = 40. All four filters see the same
# channel, input and noise in every run.

# %%
import numpy as np

from rl1lae import run_monte_carlo, steady_state_mse
from rl1lae.config import apply_overrides, get_preset

config = apply_overrides(get_preset("fig3").config, runs=20, iterations=3000)
trajectories = run_monte_carlo(config)

# %%
for algorithm, traj in trajectories.items():
    checkpoints = traj.mse_db[[0, 299, 999, 2999]]
    print(f"{algorithm.value:8s}", "  ".join(f"{v:7.2f}" for v in checkpoints),
          f"  steady {steady_state_mse(traj, 0.1):7.2f} dB")

# %% [markdown]
# Optional plot, if matplotlib is around.

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for algorithm, traj in trajectories.items():
        ax.plot(np.arange(1, len(traj) + 1), traj.mse_db, label=algorithm.value)
    ax.set_xlabel("iteration")
    ax.set_ylabel("average MSE (dB)")
    ax.legend()
    fig.tight_layout()
    fig.savefig("learning_curves_fig3.png", dpi=120)
    print("saved learning_curves_fig3.png")
