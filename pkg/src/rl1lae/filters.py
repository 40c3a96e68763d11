"""Adaptive FIR channel estimators.

Four single-output estimators share one state machine:

* ``LMS``      -- w <- w + mu * e * x
* ``LAE``      -- w <- w + mu * sgn(e) * x            (sign-error / least absolute error)
* ``RL1_LMS``  -- LMS plus a reweighted-L1 zero attractor
* ``RL1_LAE``  -- LAE plus a reweighted-L1 zero attractor

The zero attractor for coefficient ``i`` is::

    mu * lambda_r * sgn(w_i(n)) / (delta_r + |w_i(n-1)|)

so the sign is taken from the current iterate while the reweighting reads the
previous one. Each filter therefore keeps both ``weights`` and
``previous_weights``.

Everything is real-valued; ``sgn(0) == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DimensionError, DivergenceError, NonFiniteInputError, ParameterError

__all__ = [
    "Algorithm",
    "FilterParams",
    "FilterState",
    "StepRecord",
    "compute_reweight_vector",
    "increment_bound",
    "lae_step",
    "lms_step",
    "rl1_lae_cost",
    "rl1_lae_step",
    "rl1_lms_step",
    "sgn",
]


class Algorithm(str, Enum):
    LMS = "LMS"
    LAE = "LAE"
    RL1_LMS = "RL1_LMS"
    RL1_LAE = "RL1_LAE"

    @property
    def uses_sign_error(self) -> bool:
        return self in (Algorithm.LAE, Algorithm.RL1_LAE)

    @property
    def is_sparse(self) -> bool:
        return self in (Algorithm.RL1_LMS, Algorithm.RL1_LAE)

    @classmethod
    def parse(cls, label) -> "Algorithm":
        """Accept ``"RL1_LAE"``, ``"rl1-lae"``, ``"Rl1Lae"`` style spellings."""
        if isinstance(label, cls):
            return label
        key = str(label).strip().upper().replace("-", "_")
        if key in cls.__members__:
            return cls[key]
        compact = key.replace("_", "")
        for member in cls:
            if member.value.replace("_", "") == compact:
                return member
        raise ParameterError(f"unknown algorithm {label!r}; expected one of {[a.value for a in cls]}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FilterParams:
    """Step size, sparse-penalty weight and reweighting threshold.

    Defaults are the values used throughout the simulations:
    ``mu = 0.01``, ``lambda_r = 1e-4``, ``delta_r = 0.01``.
    """

    mu: float = 0.01
    lambda_r: float = 1e-4
    delta_r: float = 0.01

    def __post_init__(self):
        for name in ("mu", "lambda_r", "delta_r"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.mu <= 0:
            raise ParameterError(f"mu must be > 0, got {self.mu}")
        if self.lambda_r < 0:
            raise ParameterError(f"lambda_r must be >= 0, got {self.lambda_r}")
        if self.delta_r <= 0:
            raise ParameterError(f"delta_r must be > 0, got {self.delta_r}")


@dataclass(frozen=True)
class StepRecord:
    prior_error: float
    updated_weights: np.ndarray


def sgn(x):
    """Elementwise sign with ``sgn(0) == 0``."""
    return np.sign(x)


def compute_reweight_vector(previous_weights, delta_r: float) -> np.ndarray:
    """Per-coefficient reweighting ``1 / (delta_r + |w_prev_i|)``.

    All entries are strictly positive because ``delta_r > 0``.
    """
    if not delta_r > 0:
        raise ParameterError(f"delta_r must be > 0, got {delta_r}")
    previous_weights = np.asarray(previous_weights, dtype=float)
    return 1.0 / (delta_r + np.abs(previous_weights))


def rl1_lae_cost(weights, previous_weights, error: float, lambda_r: float, delta_r: float) -> float:
    """Instantaneous RL1-LAE cost ``|e| + lambda_r * sum_i |w_i| / (delta_r + |w_prev_i|)``.

    Only used to check the update direction numerically; the step functions
    never call it.
    """
    if lambda_r < 0:
        raise ParameterError(f"lambda_r must be >= 0, got {lambda_r}")
    weights = np.asarray(weights, dtype=float)
    previous_weights = np.asarray(previous_weights, dtype=float)
    if weights.shape != previous_weights.shape:
        raise DimensionError(f"weights {weights.shape} and previous_weights {previous_weights.shape} differ")
    reweight = compute_reweight_vector(previous_weights, delta_r)
    return float(abs(error) + lambda_r * np.sum(reweight * np.abs(weights)))


def increment_bound(params: FilterParams, regressor) -> float:
    """Upper bound on ``||w(n+1) - w(n)||_inf`` for the sign-error filters."""
    return params.mu * (float(np.max(np.abs(regressor))) + params.lambda_r / params.delta_r)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class FilterState:
    """Mutable state of one adaptive estimator.

    Parameters
    ----------
    algorithm : Algorithm or str
        Which update rule :meth:`step` applies.
    num_taps : int
        Filter length ``N``.
    params : FilterParams, optional
        Defaults to :class:`FilterParams` ``()``.

    Both ``weights`` and ``previous_weights`` start at zero. Weight arrays are
    replaced (never modified in place) on every step and are read-only, so
    references handed out in :class:`StepRecord` stay valid.
    """

    def __init__(self, algorithm, num_taps: int, params: FilterParams | None = None):
        if int(num_taps) != num_taps or num_taps < 1:
            raise ParameterError(f"num_taps must be a positive integer, got {num_taps!r}")
        self.algorithm = Algorithm.parse(algorithm)
        self.num_taps = int(num_taps)
        self.params = params if params is not None else FilterParams()
        self.reset()

    def reset(self):
        self.weights = _readonly(np.zeros(self.num_taps))
        self.previous_weights = self.weights
        self.iteration = 0

    def step(self, regressor, observation) -> StepRecord:
        """Consume one ``(x(n), d(n))`` pair with this filter's update rule."""
        return _STEPPERS[self.algorithm](self, regressor, observation)

    def __repr__(self):
        return (
            f"FilterState({self.algorithm.value}, num_taps={self.num_taps}, "
            f"iteration={self.iteration}, params={self.params})"
        )


def _advance(state: FilterState, regressor, observation, expected: Algorithm) -> StepRecord:
    if state.algorithm is not expected:
        raise ParameterError(f"{expected.value} step applied to a {state.algorithm.value} filter")
    x = np.asarray(regressor, dtype=float)
    if x.shape != (state.num_taps,):
        raise DimensionError(f"regressor shape {x.shape} does not match filter length {state.num_taps}")
    d = float(observation)
    if not (math.isfinite(d) and np.isfinite(x).all()):
        raise NonFiniteInputError(f"non-finite input at iteration {state.iteration}")

    params = state.params
    w = state.weights
    e = d - float(x @ w)
    drive = float(sgn(e)) if expected.uses_sign_error else e
    updated = w + params.mu * drive * x
    # lambda_r == 0 skips the term entirely so the reduction to LMS/LAE is bitwise.
    if expected.is_sparse and params.lambda_r:
        shrink = sgn(w) / (params.delta_r + np.abs(state.previous_weights))
        updated = updated - params.mu * params.lambda_r * shrink

    if not np.isfinite(updated).all():
        raise DivergenceError(state.iteration, expected.value)
    state.previous_weights = w
    state.weights = _readonly(updated)
    state.iteration += 1
    return StepRecord(e, state.weights)


def lms_step(state: FilterState, regressor, observation) -> StepRecord:
    """``w(n+1) = w(n) + mu * e(n) * x(n)``."""
    return _advance(state, regressor, observation, Algorithm.LMS)


def lae_step(state: FilterState, regressor, observation) -> StepRecord:
    """``w(n+1) = w(n) + mu * sgn(e(n)) * x(n)``.

    A zero error leaves the weights untouched.
    """
    return _advance(state, regressor, observation, Algorithm.LAE)


def rl1_lms_step(state: FilterState, regressor, observation) -> StepRecord:
    return _advance(state, regressor, observation, Algorithm.RL1_LMS)


def rl1_lae_step(state: FilterState, regressor, observation) -> StepRecord:
    """Sign-error update plus reweighted-L1 zero attraction.

    Elementwise::

        w_i(n+1) = w_i(n) + mu*sgn(e)*x_i - mu*lambda_r*sgn(w_i(n)) / (delta_r + |w_i(n-1)|)

    This is a subgradient step on ``rl1_lae_cost`` with the reweighting held
    fixed at the previous iterate.
    """
    return _advance(state, regressor, observation, Algorithm.RL1_LAE)


_STEPPERS = {
    Algorithm.LMS: lms_step,
    Algorithm.LAE: lae_step,
    Algorithm.RL1_LMS: rl1_lms_step,
    Algorithm.RL1_LAE: rl1_lae_step,
}
