# %% [markdown]
# # One update at a time
#
# Each estimator is a small state machine: feed it a regressor x(n) and an
# observation d(n), it returns the a-priori error and the new weights.

# %%
import numpy as np

from rl1lae import Algorithm, FilterParams, FilterState, compute_reweight_vector, rl1_lae_cost

params = FilterParams(mu=0.01, lambda_r=1e-4, delta_r=0.01)

# %% [markdown]
# The LMS step scales by the error itself, the LAE step only by its sign.
# A large error (an impulse) moves LMS proportionally further; LAE moves the same amount.

# %%
for algorithm in (Algorithm.LMS, Algorithm.LAE):
    for d in (1.0, 50.0):
        f = FilterState(algorithm, 2, params)
        rec = f.step([1.0, -1.0], d)
        print(f"{algorithm.value:4s} d={d:5.1f}  e={rec.prior_error:5.1f}  w'={rec.updated_weights}")

# %% [markdown]
# The reweighted-L1 filters add a pull toward zero. It is strongest for
# coefficients that were small at the previous step: the reweighting vector
# is 1/(delta_r + |w(n-1)|).

# %%
print(compute_reweight_vector([0.0, 0.09, 1.0], params.delta_r))

# %%
f = FilterState(Algorithm.RL1_LAE, 2, params)
f.weights = np.array([0.1, 0.0])
f.previous_weights = np.array([0.1, 0.0])
rec = f.step([1.0, 0.0], 0.2)
print("RL1-LAE:", rec.updated_weights, " expected first tap", 0.11 - 1e-6 / 0.11)

# %% [markdown]
# The update is a subgradient step on |e| + lambda_r * sum |w_i| / (delta_r + |w_i(n-1)|).
# Compare it against a central finite difference of that cost.

# %%
rng = np.random.default_rng(0)
w, w_prev, x = rng.uniform(0.1, 1, 4), rng.standard_normal(4), rng.standard_normal(4)
d = float(x @ w + 0.5)
f = FilterState(Algorithm.RL1_LAE, 4, params)
f.weights, f.previous_weights = w.copy(), w_prev.copy()
step = (f.step(x, d).updated_weights - w) / params.mu

h = 1e-8
grad = np.array([
    (rl1_lae_cost(w + h * e_i, w_prev, d - x @ (w + h * e_i), params.lambda_r, params.delta_r)
     - rl1_lae_cost(w - h * e_i, w_prev, d - x @ (w - h * e_i), params.lambda_r, params.delta_r)) / (2 * h)
    for e_i in np.eye(4)
])
print("update / mu      :", step)
print("-finite-diff grad:", -grad)
