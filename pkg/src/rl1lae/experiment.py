"""Monte-Carlo learning curves for the four estimators.

A scenario fixes the channel statistics, the noise mixture, the filter
parameters and the number of runs. Each trial draws one channel, one training
sequence and one noise sequence and feeds the *same* realization to every
algorithm, so the differences between curves come from the algorithms alone.
Averaging is an ordered reduction over trial indices, which makes results
independent of how many worker processes computed the trials.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .exceptions import DimensionError, DivergenceError, ParameterError
from .filters import Algorithm, FilterParams, FilterState, increment_bound
from .signals import ChannelSpec, GmmNoiseParams, derive_seed, snr_to_sigma1_sq, synthesize_trial

log = logging.getLogger(__name__)

__all__ = [
    "MseTrajectory",
    "ScenarioConfig",
    "TrialResult",
    "aggregate_trials",
    "normalized_mse",
    "run_monte_carlo",
    "run_trial",
    "steady_state_mse",
    "to_db",
]

ALL_ALGORITHMS = (Algorithm.LMS, Algorithm.LAE, Algorithm.RL1_LMS, Algorithm.RL1_LAE)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one set of learning curves.

    ``noise.sigma1_sq`` is always derived from ``snr_db``; build instances with
    :meth:`create` (or :meth:`with_changes`) rather than filling it in by hand.
    """

    channel: ChannelSpec = field(default_factory=ChannelSpec)
    noise: GmmNoiseParams = field(default_factory=lambda: GmmNoiseParams(phi=0.2, sigma1_sq=0.1, sigma2_sq=40.0))
    snr_db: float = 10.0
    filter_params: Mapping[Algorithm, FilterParams] = field(
        default_factory=lambda: {a: FilterParams() for a in ALL_ALGORITHMS}
    )
    algorithms: tuple = ALL_ALGORITHMS
    iterations: int = 3000
    num_runs: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        algorithms = tuple(Algorithm.parse(a) for a in self.algorithms)
        if not algorithms:
            raise ParameterError("algorithms must be non-empty")
        if len(set(algorithms)) != len(algorithms):
            raise ParameterError("algorithms must not repeat")
        object.__setattr__(self, "algorithms", algorithms)
        params = {Algorithm.parse(k): v for k, v in dict(self.filter_params).items()}
        missing = [a.value for a in algorithms if a not in params]
        if missing:
            raise ParameterError(f"no filter parameters for {missing}")
        object.__setattr__(self, "filter_params", {a: params[a] for a in algorithms})
        for name in ("iterations", "num_runs"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if isinstance(self.master_seed, bool) or int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ParameterError(f"master_seed must be a non-negative integer, got {self.master_seed!r}")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        snr = float(self.snr_db)
        if not math.isfinite(snr):
            raise ParameterError(f"snr_db must be finite, got {self.snr_db!r}")
        object.__setattr__(self, "snr_db", snr)
        if self.noise.sigma1_sq != snr_to_sigma1_sq(snr):
            raise ParameterError(
                f"noise.sigma1_sq={self.noise.sigma1_sq} disagrees with snr_db={snr}; "
                "use ScenarioConfig.create so it is derived from the SNR"
            )

    @classmethod
    def create(
        cls,
        *,
        length_n: int = 80,
        sparsity_k: int = 8,
        snr_db: float = 10.0,
        phi: float = 0.2,
        sigma2_sq: float = 40.0,
        alpha1: float = 0.0,
        alpha2: float = 0.0,
        filter_params: FilterParams | Mapping | None = None,
        algorithms: Iterable = ALL_ALGORITHMS,
        iterations: int = 3000,
        num_runs: int = 1000,
        master_seed: int = 0,
    ) -> "ScenarioConfig":
        """Scenario from flat parameters; ``sigma1_sq`` follows from ``snr_db``."""
        algorithms = tuple(Algorithm.parse(a) for a in algorithms)
        if filter_params is None:
            filter_params = FilterParams()
        if isinstance(filter_params, FilterParams):
            filter_params = {a: filter_params for a in algorithms}
        noise = GmmNoiseParams(
            phi=phi, sigma1_sq=snr_to_sigma1_sq(snr_db), sigma2_sq=sigma2_sq, alpha1=alpha1, alpha2=alpha2
        )
        return cls(
            channel=ChannelSpec(length_n, sparsity_k),
            noise=noise,
            snr_db=snr_db,
            filter_params=filter_params,
            algorithms=algorithms,
            iterations=iterations,
            num_runs=num_runs,
            master_seed=master_seed,
        )

    def with_changes(self, **changes) -> "ScenarioConfig":
        """Copy with flat-parameter overrides (same keywords as :meth:`create`).

        ``mu``, ``lambda_r`` and ``delta_r`` apply to every algorithm.
        """
        flat = dict(
            length_n=self.channel.length_n,
            sparsity_k=self.channel.sparsity_k,
            snr_db=self.snr_db,
            phi=self.noise.phi,
            sigma2_sq=self.noise.sigma2_sq,
            alpha1=self.noise.alpha1,
            alpha2=self.noise.alpha2,
            filter_params=dict(self.filter_params),
            algorithms=self.algorithms,
            iterations=self.iterations,
            num_runs=self.num_runs,
            master_seed=self.master_seed,
        )
        shared = {k: changes.pop(k) for k in ("mu", "lambda_r", "delta_r") if k in changes}
        unknown = set(changes) - set(flat)
        if unknown:
            raise ParameterError(f"unknown scenario fields {sorted(unknown)}")
        flat.update(changes)
        algorithms = tuple(Algorithm.parse(a) for a in flat["algorithms"])
        params = flat["filter_params"]
        if isinstance(params, FilterParams):
            params = {a: params for a in algorithms}
        params = {a: params.get(a, FilterParams()) for a in algorithms}
        if shared:
            params = {a: replace(p, **shared) for a, p in params.items()}
        flat["filter_params"] = params
        flat["algorithms"] = algorithms
        return ScenarioConfig.create(**flat)


@dataclass
class TrialResult:
    """One algorithm's run over one realization.

    ``mse[n]`` is the normalized MSE after ``n + 1`` updates. A diverged run is
    truncated at the failing step. ``max_increment_ratio`` is the largest
    observed ``||w(n+1) - w(n)||_inf`` divided by its theoretical bound (sign
    filters only; ``None`` otherwise).
    """

    algorithm: Algorithm
    mse: np.ndarray
    diverged: bool = False
    max_increment_ratio: float | None = None


@dataclass
class MseTrajectory:
    algorithm: Algorithm
    mse_per_iteration: np.ndarray
    num_runs: int
    diverged_runs: int = 0
    max_increment_ratio: float | None = None

    @property
    def completed_runs(self) -> int:
        return self.num_runs - self.diverged_runs

    @property
    def mse_db(self) -> np.ndarray:
        return to_db(self.mse_per_iteration)

    def __len__(self):
        return len(self.mse_per_iteration)


def to_db(values):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(values)


def normalized_mse(estimate, truth) -> float:
    """``||estimate - truth||^2 / ||truth||^2``."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise DimensionError(f"estimate {estimate.shape} and truth {truth.shape} differ")
    energy = float(truth @ truth)
    if energy == 0.0:
        raise ParameterError("truth has zero norm")
    diff = estimate - truth
    return float(diff @ diff) / energy


def steady_state_mse(trajectory, tail_fraction: float = 0.1) -> float:
    """Mean of the last ``ceil(tail_fraction * len)`` entries, in dB."""
    values = trajectory.mse_per_iteration if isinstance(trajectory, MseTrajectory) else trajectory
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ParameterError("cannot take the steady state of an empty trajectory")
    if not 0.0 < tail_fraction <= 1.0:
        raise ParameterError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    tail = math.ceil(tail_fraction * values.size)
    return float(to_db(np.mean(values[-tail:])))


def trial_seed(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    return derive_seed(master_seed, trial_index)


def _run_filter(algorithm, params, regressors, observations, truth, check_increments):
    state = FilterState(algorithm, truth.size, params)
    energy = float(truth @ truth)
    mse = np.empty(len(observations))
    worst = 0.0 if (check_increments and algorithm.uses_sign_error) else None
    # Overflow on the way to divergence is reported through DivergenceError instead.
    with np.errstate(over="ignore", invalid="ignore"):
        return _run_loop(state, algorithm, params, regressors, observations, truth, energy, mse, worst)


def _run_loop(state, algorithm, params, regressors, observations, truth, energy, mse, worst):
    for n, (x, d) in enumerate(zip(regressors, observations)):
        before = state.weights
        try:
            after = state.step(x, d).updated_weights
        except DivergenceError:
            log.warning("%s diverged at iteration %d", algorithm.value, n)
            return TrialResult(algorithm, mse[:n].copy(), True, worst)
        if worst is not None:
            moved = float(np.max(np.abs(after - before)))
            bound = increment_bound(params, x)
            worst = max(worst, moved / bound if bound else (math.inf if moved else 0.0))
        diff = after - truth
        mse[n] = float(diff @ diff) / energy
    return TrialResult(algorithm, mse, False, worst)


def run_trial(config: ScenarioConfig, trial_index: int, check_increments: bool = True, signals=None) -> dict:
    """Run every configured algorithm on one shared realization.

    Returns ``{Algorithm: TrialResult}``. With ``check_increments`` the sign
    filters record how close each step came to the bounded-increment limit.
    ``signals`` replaces the seeded realization with a given
    :class:`~rl1lae.signals.TrialSignals`.
    """
    if signals is None:
        signals = synthesize_trial(
            config.channel, config.noise, config.iterations, trial_seed(config.master_seed, trial_index)
        )
    elif signals.num_taps != config.channel.length_n:
        raise DimensionError(f"signals have {signals.num_taps} taps, config expects {config.channel.length_n}")
    regressors = signals.regressors()
    return {
        algorithm: _run_filter(
            algorithm,
            config.filter_params[algorithm],
            regressors,
            signals.observations,
            signals.true_channel,
            check_increments,
        )
        for algorithm in config.algorithms
    }


class _Accumulator:
    def __init__(self, algorithms):
        self.totals = {a: None for a in algorithms}
        self.completed = {a: 0 for a in algorithms}
        self.diverged = {a: 0 for a in algorithms}
        self.worst = {a: None for a in algorithms}

    def add(self, results):
        for algorithm, trial in results.items():
            if trial.max_increment_ratio is not None:
                w = self.worst[algorithm]
                self.worst[algorithm] = trial.max_increment_ratio if w is None else max(w, trial.max_increment_ratio)
            if trial.diverged:
                self.diverged[algorithm] += 1
                continue
            mse = np.asarray(trial.mse, dtype=float)
            total = self.totals[algorithm]
            if total is None:
                self.totals[algorithm] = mse.copy()
            elif mse.shape != total.shape:
                raise DimensionError(f"trial length {mse.size} differs from {total.size}")
            else:
                total += mse
            self.completed[algorithm] += 1

    def trajectories(self, num_runs):
        out = {}
        for algorithm, total in self.totals.items():
            mean = np.empty(0) if total is None else total / self.completed[algorithm]
            out[algorithm] = MseTrajectory(
                algorithm, mean, num_runs, self.diverged[algorithm], self.worst[algorithm]
            )
        return out


def aggregate_trials(algorithm, trials: Iterable[TrialResult]) -> MseTrajectory:
    """Average completed trials in the order given, skipping diverged ones."""
    algorithm = Algorithm.parse(algorithm)
    acc = _Accumulator([algorithm])
    count = 0
    for trial in trials:
        acc.add({algorithm: trial})
        count += 1
    return acc.trajectories(count)[algorithm]


def _trial_worker(args):
    config, index, check = args
    return run_trial(config, index, check)


def run_monte_carlo(
    config: ScenarioConfig,
    workers: int = 1,
    check_increments: bool = True,
    progress: Callable[[int, int], None] | None = None,
    trial_indices: Sequence[int] | None = None,
) -> dict:
    """Average learning curves over ``config.num_runs`` trials.

    Parameters
    ----------
    config : ScenarioConfig
    workers : int
        Number of worker processes. ``1`` runs in-process. The output is
        bitwise identical for any value because trials are reduced in index
        order.
    check_increments : bool
        Track the bounded-increment ratio of the sign filters.
    progress : callable, optional
        Called as ``progress(done, total)`` after each trial.
    trial_indices : sequence of int, optional
        Trials to run; defaults to ``range(config.num_runs)``.

    Returns
    -------
    dict mapping :class:`Algorithm` to :class:`MseTrajectory`.
    """
    indices = list(range(config.num_runs)) if trial_indices is None else list(trial_indices)
    acc = _Accumulator(config.algorithms)
    jobs = ((config, i, check_increments) for i in indices)
    if workers is None or workers <= 1:
        results = map(_trial_worker, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_trial_worker, jobs, chunksize=max(1, len(indices) // (4 * workers)))
    try:
        for done, trial in enumerate(results, 1):
            acc.add(trial)
            if progress is not None:
                progress(done, len(indices))
    finally:
        if pool is not None:
            pool.shutdown()
    trajectories = acc.trajectories(len(indices))
    for algorithm, traj in trajectories.items():
        if traj.diverged_runs:
            log.warning("%s: %d of %d runs diverged", algorithm.value, traj.diverged_runs, traj.num_runs)
    return trajectories
