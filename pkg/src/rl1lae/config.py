"""Flat TOML scenario documents and the figure presets.

A scenario document is a flat list of ``key = value`` pairs. Every key is
optional; missing keys take the simulation defaults (N = 80, K = 8,
SNR = 10 dB, mu = 0.01, lambda_r = 1e-4, delta_r = 0.01, alpha1 = alpha2 = 0,
phi = 0.2, sigma2_sq = 40, 3000 iterations, 1000 runs, seed 0)::

    snr_db = 5
    phi = 0.1
    algorithms = ["LAE", "RL1_LAE"]
    rl1_lae_lambda_r = 1e-3     # per-algorithm override

The background variance ``sigma1_sq`` is never read from the document; it is
always ``10 ** (-snr_db / 10)``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exceptions import ConfigError, ParameterError
from .experiment import ALL_ALGORITHMS, ScenarioConfig
from .filters import Algorithm, FilterParams

__all__ = [
    "DEFAULTS",
    "Preset",
    "apply_overrides",
    "config_from_mapping",
    "PRESETS",
    "config_to_dict",
    "get_preset",
    "list_presets",
    "load_config",
    "parse_config",
    "serialize_config",
]

DEFAULTS = {
    "channel_length": 80,
    "sparsity": 8,
    "snr_db": 10.0,
    "phi": 0.2,
    "sigma2_sq": 40.0,
    "alpha1": 0.0,
    "alpha2": 0.0,
    "mu": 0.01,
    "lambda_r": 1e-4,
    "delta_r": 0.01,
    "algorithms": [a.value for a in ALL_ALGORITHMS],
    "iterations": 3000,
    "runs": 1000,
    "seed": 0,
}

_FILTER_KEYS = ("mu", "lambda_r", "delta_r")
_INT_KEYS = {"channel_length", "sparsity", "iterations", "runs", "seed"}


def _check_range(key, value):
    bad = None
    if key in ("channel_length", "iterations", "runs", "sparsity") and value < 1:
        bad = "must be >= 1"
    elif key == "seed" and value < 0:
        bad = "must be >= 0"
    elif key == "phi" and not 0.0 <= value <= 1.0:
        bad = "must lie in [0, 1]"
    elif key == "sigma2_sq" and value < 0:
        bad = "must be >= 0"
    elif key.endswith("mu") and value <= 0:
        bad = "must be > 0"
    elif key.endswith("delta_r") and value <= 0:
        bad = "must be > 0"
    elif key.endswith("lambda_r") and value < 0:
        bad = "must be >= 0"
    if bad:
        raise ConfigError(f"{bad}, got {value!r}", key=key)


def _coerce(key, value):
    if key == "algorithms":
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split() if v]
        if not isinstance(value, list) or not value:
            raise ConfigError("must be a non-empty list of algorithm names", key=key)
        try:
            algorithms = [Algorithm.parse(v) for v in value]
        except ParameterError as exc:
            raise ConfigError(str(exc), key=key) from None
        if len(set(algorithms)) != len(algorithms):
            raise ConfigError("algorithms must not repeat", key=key)
        return algorithms
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    if key in _INT_KEYS:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
    else:
        if not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key=key)
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"must be finite, got {value!r}", key=key)
    _check_range(key, value)
    return value


def _override_keys():
    return {f"{a.value.lower()}_{p}": (a, p) for a in Algorithm for p in _FILTER_KEYS}


def config_from_mapping(values: dict) -> ScenarioConfig:
    """Resolve a flat mapping (already parsed) into a :class:`ScenarioConfig`."""
    overrides = _override_keys()
    resolved = dict(DEFAULTS)
    per_algorithm = {}
    for key, raw in values.items():
        if key == "sigma1_sq":
            raise ConfigError("is derived from snr_db and cannot be set directly", key=key)
        if isinstance(raw, dict):
            raise ConfigError("nested tables are not supported; use flat keys", key=key)
        if key in overrides:
            per_algorithm[overrides[key]] = _coerce(key, raw)
        elif key in DEFAULTS:
            resolved[key] = _coerce(key, raw)
        else:
            raise ConfigError("unknown key", key=key)

    algorithms = [Algorithm.parse(a) for a in resolved["algorithms"]]
    if resolved["sparsity"] > resolved["channel_length"]:
        raise ConfigError(
            f"must not exceed channel_length={resolved['channel_length']}, got {resolved['sparsity']}",
            key="sparsity",
        )
    params = {}
    for a in algorithms:
        fields = {p: per_algorithm.get((a, p), resolved[p]) for p in _FILTER_KEYS}
        params[a] = FilterParams(**fields)
    try:
        return ScenarioConfig.create(
            length_n=resolved["channel_length"],
            sparsity_k=resolved["sparsity"],
            snr_db=resolved["snr_db"],
            phi=resolved["phi"],
            sigma2_sq=resolved["sigma2_sq"],
            alpha1=resolved["alpha1"],
            alpha2=resolved["alpha2"],
            filter_params=params,
            algorithms=algorithms,
            iterations=resolved["iterations"],
            num_runs=resolved["runs"],
            master_seed=resolved["seed"],
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(source: str) -> ScenarioConfig:
    """Parse a flat TOML document into a resolved scenario.

    Raises :class:`ConfigError` naming the offending key for unknown keys,
    wrong types and out-of-range values.
    """
    try:
        values = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed document: {exc}") from None
    return config_from_mapping(values)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: ScenarioConfig) -> dict:
    """Flat key/value view of a scenario (the inverse of :func:`config_from_mapping`).

    Filter parameters shared by every algorithm are written once; differing
    ones are written as ``<algorithm>_<param>`` overrides relative to the
    first algorithm's values.
    """
    first = config.filter_params[config.algorithms[0]]
    out = {
        "channel_length": config.channel.length_n,
        "sparsity": config.channel.sparsity_k,
        "snr_db": config.snr_db,
        "phi": config.noise.phi,
        "sigma2_sq": config.noise.sigma2_sq,
        "alpha1": config.noise.alpha1,
        "alpha2": config.noise.alpha2,
        "mu": first.mu,
        "lambda_r": first.lambda_r,
        "delta_r": first.delta_r,
        "algorithms": [a.value for a in config.algorithms],
        "iterations": config.iterations,
        "runs": config.num_runs,
        "seed": config.master_seed,
    }
    for a in config.algorithms[1:]:
        p = config.filter_params[a]
        for name in _FILTER_KEYS:
            if getattr(p, name) != getattr(first, name):
                out[f"{a.value.lower()}_{name}"] = getattr(p, name)
    return out


def apply_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Copy of ``config`` with flat document keys replaced, e.g. ``runs=100``."""
    values = config_to_dict(config)
    values.update(overrides)
    return config_from_mapping(values)


def _toml_value(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    if isinstance(value, str):
        return '"' + value + '"'
    if isinstance(value, float):
        text = repr(value)
        # TOML floats need a fractional part or exponent.
        return text if any(c in text for c in ".eE") else text + ".0"
    return str(value)


def serialize_config(config: ScenarioConfig) -> str:
    """Render a scenario as a flat TOML document; ``parse_config`` inverts it exactly."""
    return "".join(f"{k} = {_toml_value(v)}\n" for k, v in config_to_dict(config).items())


@dataclass(frozen=True)
class Preset:
    """A named scenario reproducing one of the published learning-curve figures.

    ``sweep`` is ``None`` for single scenarios, or ``(key, values)`` for a
    parameter sweep over the base config.
    """

    name: str
    description: str
    config: ScenarioConfig
    sweep: tuple | None = None

    def configs(self):
        """``[(sweep_value, config), ...]``; a single ``(None, config)`` when not a sweep."""
        if self.sweep is None:
            return [(None, self.config)]
        key, values = self.sweep
        return [(v, apply_overrides(self.config, **{key: v})) for v in values]


def _preset(name, description, sweep=None, **changes):
    return Preset(name, description, ScenarioConfig.create(**changes), sweep)


PRESETS = {
    p.name: p
    for p in (
        # sigma2_sq is inactive at phi = 0; 40 keeps fig1 identical to the fig6 phi = 0 point.
        _preset("fig1", "Gaussian noise only: K=8, SNR=10 dB, phi=0", phi=0.0, sigma2_sq=40.0),
        _preset("fig2", "GMM noise: K=8, SNR=10 dB, phi=0.2, sigma2^2=20", phi=0.2, sigma2_sq=20.0),
        _preset("fig3", "GMM noise: K=8, SNR=10 dB, phi=0.2, sigma2^2=40", phi=0.2, sigma2_sq=40.0),
        _preset("fig4", "GMM noise, sparser channel: K=4, SNR=10 dB, phi=0.2, sigma2^2=40", sparsity_k=4, phi=0.2, sigma2_sq=40.0),
        _preset("fig5", "GMM noise: K=8, SNR=10 dB, phi=0.2, sigma2^2=80", phi=0.2, sigma2_sq=80.0),
        _preset(
            "fig6",
            "Impulse-probability sweep: K=8, SNR=10 dB, sigma2^2=40, phi in {0, 0.1, 0.2, 0.4}",
            sweep=("phi", (0.0, 0.1, 0.2, 0.4)),
            phi=0.0,
            sigma2_sq=40.0,
        ),
    )
}


def list_presets() -> dict:
    """Catalog of available presets keyed by name."""
    return dict(PRESETS)


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
