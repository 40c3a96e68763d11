"""Impulse-robust sparse adaptive channel estimation.

The reweighted-L1 least-absolute-error estimator (``RL1_LAE``) together with
LMS, LAE and RL1-LMS benchmarks, seeded signal generators for sparse channels
under Gaussian-mixture impulsive noise, and a Monte-Carlo harness that
produces average normalized-MSE learning curves.
"""

from .exceptions import (
    ConfigError,
    DimensionError,
    DivergenceError,
    NonFiniteInputError,
    ParameterError,
)
from .filters import (
    Algorithm,
    FilterParams,
    FilterState,
    StepRecord,
    compute_reweight_vector,
    lae_step,
    lms_step,
    rl1_lae_cost,
    rl1_lae_step,
    rl1_lms_step,
)
from .signals import (
    ChannelSpec,
    GmmNoiseParams,
    TrialSignals,
    generate_sparse_channel,
    generate_training_signal,
    sample_gmm_noise,
    snr_to_sigma1_sq,
    synthesize_trial,
)
from .experiment import (
    MseTrajectory,
    ScenarioConfig,
    normalized_mse,
    run_monte_carlo,
    run_trial,
    steady_state_mse,
)

__version__ = "0.1.0"
