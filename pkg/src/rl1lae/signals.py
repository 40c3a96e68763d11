"""Seeded generators for the channel, training input and impulsive noise.

Every generator is a pure function of its parameters and a seed. Seeds may be
plain integers or :class:`numpy.random.SeedSequence` objects; named
sub-streams are derived with :func:`derive_seed` so that a trial's channel,
input and noise never share random draws and do not depend on the order in
which trials run.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import DimensionError, ParameterError

__all__ = [
    "ChannelSpec",
    "GmmNoiseParams",
    "TrialSignals",
    "derive_seed",
    "generate_sparse_channel",
    "generate_training_signal",
    "regressor_matrix",
    "sample_gmm_noise",
    "snr_to_sigma1_sq",
    "synthesize_trial",
]


@dataclass(frozen=True)
class GmmNoiseParams:
    """Two-component Gaussian mixture.

    With probability ``1 - phi`` a sample comes from ``N(alpha1, sigma1_sq)``
    (background noise), otherwise from ``N(alpha2, sigma2_sq)`` (impulse).
    """

    phi: float = 0.0
    sigma1_sq: float = 0.1
    sigma2_sq: float = 40.0
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        for name in ("phi", "sigma1_sq", "sigma2_sq", "alpha1", "alpha2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.phi <= 1.0:
            raise ParameterError(f"phi must lie in [0, 1], got {self.phi}")
        if self.sigma1_sq < 0:
            raise ParameterError(f"sigma1_sq must be >= 0, got {self.sigma1_sq}")
        if self.sigma2_sq < 0:
            raise ParameterError(f"sigma2_sq must be >= 0, got {self.sigma2_sq}")

    @property
    def mean(self) -> float:
        return (1 - self.phi) * self.alpha1 + self.phi * self.alpha2

    @property
    def variance(self) -> float:
        second = (1 - self.phi) * (self.sigma1_sq + self.alpha1**2) + self.phi * (self.sigma2_sq + self.alpha2**2)
        return second - self.mean**2


@dataclass(frozen=True)
class ChannelSpec:
    length_n: int = 80
    sparsity_k: int = 8

    def __post_init__(self):
        for name in ("length_n", "sparsity_k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.length_n < 1:
            raise ParameterError(f"length_n must be >= 1, got {self.length_n}")
        if not 1 <= self.sparsity_k <= self.length_n:
            raise ParameterError(f"sparsity_k must lie in [1, {self.length_n}], got {self.sparsity_k}")


@dataclass(frozen=True)
class TrialSignals:
    """One realization of the observation model ``d(n) = x(n)^T w + z(n)``."""

    true_channel: np.ndarray
    input_sequence: np.ndarray
    noise_sequence: np.ndarray
    observations: np.ndarray

    @property
    def num_taps(self) -> int:
        return self.true_channel.size

    def regressors(self) -> np.ndarray:
        return regressor_matrix(self.input_sequence, self.num_taps)


def _label_code(label) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    if isinstance(label, (int, np.integer)) and label >= 0:
        return int(label)
    raise ParameterError(f"seed path entries must be non-negative ints or strings, got {label!r}")


def derive_seed(seed, *path) -> np.random.SeedSequence:
    """Child seed for a named stream, e.g. ``derive_seed(7, 12, "noise")``.

    The result depends only on ``seed`` and ``path``; strings are hashed with
    CRC-32 so the mapping is stable across processes and Python versions.
    """
    if isinstance(seed, np.random.SeedSequence):
        root_entropy, root_key = seed.entropy, tuple(seed.spawn_key)
    else:
        root_entropy, root_key = seed, ()
    return np.random.SeedSequence(root_entropy, spawn_key=root_key + tuple(_label_code(p) for p in path))


def snr_to_sigma1_sq(snr_db: float) -> float:
    """Background noise variance for a unit-power training signal.

    Impulses do not enter the SNR, so this depends on ``snr_db`` alone.
    """
    return 10.0 ** (-float(snr_db) / 10.0)


def sample_gmm_noise(params: GmmNoiseParams, count: int, seed, return_labels: bool = False):
    """Draw ``count`` i.i.d. samples from the mixture.

    If ``return_labels`` is true, also return a boolean array that is ``True``
    where the sample came from the impulsive (second) component.
    """
    if not isinstance(params, GmmNoiseParams):
        raise ParameterError(f"expected GmmNoiseParams, got {type(params).__name__}")
    if int(count) != count or count < 1:
        raise ParameterError(f"count must be a positive integer, got {count!r}")
    rng = np.random.default_rng(seed)
    impulsive = rng.random(int(count)) < params.phi
    std = np.where(impulsive, math.sqrt(params.sigma2_sq), math.sqrt(params.sigma1_sq))
    mean = np.where(impulsive, params.alpha2, params.alpha1)
    noise = mean + std * rng.standard_normal(int(count))
    if return_labels:
        return noise, impulsive
    return noise


def generate_sparse_channel(spec: ChannelSpec, seed) -> np.ndarray:
    """K standard-normal taps at distinct uniform positions, scaled to unit L2 norm.

    The remaining ``N - K`` taps are exact zeros.
    """
    rng = np.random.default_rng(seed)
    positions = rng.choice(spec.length_n, size=spec.sparsity_k, replace=False)
    values = rng.standard_normal(spec.sparsity_k)
    while not np.any(values):
        values = rng.standard_normal(spec.sparsity_k)
    channel = np.zeros(spec.length_n)
    channel[positions] = values / np.linalg.norm(values)
    return channel


def generate_training_signal(length: int, seed) -> np.ndarray:
    """Unit-power white Gaussian training sequence."""
    if int(length) != length or length < 1:
        raise ParameterError(f"length must be a positive integer, got {length!r}")
    return np.random.default_rng(seed).standard_normal(int(length))


def regressor_matrix(input_sequence, num_taps: int) -> np.ndarray:
    """Tapped-delay-line windows, one row per time index.

    Row ``n`` is ``[x(n), x(n-1), ..., x(n-N+1)]`` with zeros before ``n = 0``.
    The result is a read-only strided view.
    """
    x = np.asarray(input_sequence, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"input sequence must be 1-D, got shape {x.shape}")
    padded = np.concatenate([np.zeros(num_taps - 1), x])
    return sliding_window_view(padded, num_taps)[:, ::-1]


def synthesize_trial(spec: ChannelSpec, noise: GmmNoiseParams, length: int, seed, channel=None, input_sequence=None) -> TrialSignals:
    """Build channel, input, noise and observations for one Monte-Carlo trial.

    ``channel`` and ``input_sequence`` may be supplied to override the random
    draws (their streams are still derived, so the noise is unaffected).
    """
    if channel is None:
        channel = generate_sparse_channel(spec, derive_seed(seed, "channel"))
    else:
        channel = np.asarray(channel, dtype=float).copy()
        if channel.shape != (spec.length_n,):
            raise DimensionError(f"channel shape {channel.shape} does not match N={spec.length_n}")
    if input_sequence is None:
        input_sequence = generate_training_signal(length, derive_seed(seed, "input"))
    else:
        input_sequence = np.asarray(input_sequence, dtype=float).copy()
        if input_sequence.shape != (length,):
            raise DimensionError(f"input length {input_sequence.shape} does not match {length}")
    noise_sequence = sample_gmm_noise(noise, length, derive_seed(seed, "noise"))
    observations = regressor_matrix(input_sequence, spec.length_n) @ channel + noise_sequence
    for a in (channel, input_sequence, noise_sequence, observations):
        a.flags.writeable = False
    return TrialSignals(channel, input_sequence, noise_sequence, observations)
