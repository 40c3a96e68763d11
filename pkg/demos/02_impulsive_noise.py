# %% [markdown]
# # Gaussian-mixture impulsive noise
#
# Background noise N(0, sigma1^2) with probability 1 - phi, impulses
# N(0, sigma2^2) with probability phi. sigma1^2 comes from the SNR; the
# impulses are not counted in it.

# %%
import numpy as np

from rl1lae import GmmNoiseParams, sample_gmm_noise, snr_to_sigma1_sq

sigma1_sq = snr_to_sigma1_sq(10)
print("sigma1^2 at 10 dB:", sigma1_sq)

# %%
for phi in (0.0, 0.1, 0.2, 0.4):
    p = GmmNoiseParams(phi=phi, sigma1_sq=sigma1_sq, sigma2_sq=40.0)
    z, impulsive = sample_gmm_noise(p, 200_000, seed=1, return_labels=True)
    kurt = np.mean(z**4) / np.mean(z**2) ** 2
    print(
        f"phi={phi:.1f}  var={z.var():7.3f} (theory {p.variance:7.3f})  "
        f"impulses={impulsive.mean():.3f}  kurtosis={kurt:6.1f}  max|z|={np.abs(z).max():6.2f}"
    )

# %% [markdown]
# Most of the variance sits in rare samples. That is what wrecks LMS: its
# step is proportional to the error, so a single impulse throws the weights
# far off. The sign filters only look at sgn(e).
