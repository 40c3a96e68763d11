# %% [markdown]
# # How strong is the zero attractor?
#
# Per step the attractor moves a zero tap by mu * lambda_r / delta_r. With
# mu = 0.01, lambda_r = 1e-4, delta_r = 0.01 that is 1e-4, while the sign
# term moves every tap by about mu * |x_i| ~ 1e-2. At these defaults the
# attractor barely changes the steady state. Raising lambda_r shows the
# sparsity gain and how it depends on K.

# %%
from rl1lae import run_monte_carlo, steady_state_mse
from rl1lae.config import apply_overrides, get_preset

base = apply_overrides(get_preset("fig3").config, runs=30, iterations=3000, algorithms=["LAE", "RL1_LAE"])

# %%
print(" lambda_r   K   LAE (dB)  RL1_LAE (dB)  gain")
for lambda_r in (1e-4, 1e-3, 1e-2):
    for k in (8, 4):
        config = apply_overrides(base, lambda_r=lambda_r, sparsity=k)
        lv = {a.value: steady_state_mse(t, 0.1) for a, t in run_monte_carlo(config).items()}
        print(f"{lambda_r:9.0e}  {k}   {lv['LAE']:7.2f}   {lv['RL1_LAE']:9.2f}   {lv['LAE'] - lv['RL1_LAE']:5.2f}")
