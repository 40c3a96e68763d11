"""Command-line front end.

::

    rl1lae list-presets
    rl1lae preset fig3 --runs 100 --out results/fig3
    rl1lae run scenario.toml --iterations 5000 --plot-data
    rl1lae run results/fig3/manifest.json          # replay a previous run
    rl1lae sweep --preset fig3 --param phi --values 0 0.1 0.2 0.4

Every run writes ``mse.csv`` (``iteration,algorithm,mse_linear,mse_db``) and
``manifest.json`` to the output directory. Sweeps write one ``mse_<param>_<value>.csv``
per point plus ``summary.csv`` with steady-state levels. The default output
directory is ``$RL1LAE_OUTPUT_DIR`` or ``./results``.

Exit codes: 0 success, 1 configuration error, 2 every algorithm diverged,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import apply_overrides, config_from_mapping, config_to_dict, get_preset, list_presets, load_config, serialize_config
from .exceptions import ConfigError, ParameterError
from .experiment import ScenarioConfig, run_monte_carlo, steady_state_mse, to_db

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "RL1LAE_OUTPUT_DIR"
CSV_HEADER = ("iteration", "algorithm", "mse_linear", "mse_db")
STEADY_STATE_TAIL = 0.1

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunManifest:
    config: ScenarioConfig
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    outputs: list = field(default_factory=list)
    sweep: dict | None = None
    preset: str | None = None

    @property
    def master_seed(self) -> int:
        return self.config.master_seed

    def to_dict(self) -> dict:
        return {
            "tool": "rl1lae",
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "master_seed": self.master_seed,
            "preset": self.preset,
            "config": config_to_dict(self.config),
            "config_toml": serialize_config(self.config),
            "sweep": self.sweep,
            "outputs": [str(p) for p in self.outputs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        try:
            config = config_from_mapping(data["config"])
        except KeyError:
            raise ConfigError("manifest has no 'config' section") from None
        return cls(
            config=config,
            tool_version=data.get("tool_version", "unknown"),
            timestamp=data.get("timestamp", ""),
            outputs=list(data.get("outputs", [])),
            sweep=data.get("sweep"),
            preset=data.get("preset"),
        )


def format_float(value: float) -> str:
    """Shortest round-tripping decimal; integral values drop the ``.0``."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def results_csv(trajectories: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for algorithm in sorted(trajectories, key=lambda a: str(a)):
        traj = trajectories[algorithm]
        for n, (linear, db) in enumerate(zip(traj.mse_per_iteration, to_db(traj.mse_per_iteration))):
            writer.writerow((n, str(algorithm), format_float(linear), format_float(db)))
    return buf.getvalue()


def plot_data_csv(trajectories: dict) -> str:
    """Wide table ``iteration,<alg1>,<alg2>,...`` of MSE in dB."""
    algorithms = sorted(trajectories, key=lambda a: str(a))
    length = max((len(trajectories[a]) for a in algorithms), default=0)
    columns = [to_db(trajectories[a].mse_per_iteration) for a in algorithms]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", *map(str, algorithms)])
    for n in range(length):
        writer.writerow([n, *(format_float(c[n]) if n < len(c) else "" for c in columns)])
    return buf.getvalue()


def _prepare_destination(destination) -> Path:
    destination = Path(destination)
    try:
        destination.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {destination}: {exc}") from exc
    if not os.access(destination, os.W_OK | os.X_OK):
        raise PermissionError(f"output directory {destination} is not writable")
    return destination


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_results(trajectories: dict, manifest: RunManifest, destination, plot_data: bool = False) -> list:
    """Write ``mse.csv``, ``manifest.json`` and optionally ``plot_data.csv``.

    The destination is checked before anything is written and every file is
    written atomically, so a failure never leaves a partial CSV behind.
    Returns the written paths.
    """
    destination = _prepare_destination(destination)
    paths = [destination / "mse.csv"]
    if plot_data:
        paths.append(destination / "plot_data.csv")
    manifest.outputs = [p.name for p in paths]
    _atomic_write(paths[0], results_csv(trajectories))
    if plot_data:
        _atomic_write(paths[1], plot_data_csv(trajectories))
    manifest_path = destination / "manifest.json"
    _atomic_write(manifest_path, json.dumps(manifest.to_dict(), indent=2) + "\n")
    return paths + [manifest_path]


def _sweep_label(value) -> str:
    return format_float(value) if isinstance(value, (int, float)) else str(value)


def summary_csv(param: str, results: list) -> str:
    """``<param>,algorithm,steady_state_db`` rows for ``[(value, trajectories), ...]``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((param, "algorithm", "steady_state_db"))
    for value, trajectories in results:
        for algorithm in sorted(trajectories, key=lambda a: str(a)):
            traj = trajectories[algorithm]
            level = steady_state_mse(traj, STEADY_STATE_TAIL) if len(traj) else float("nan")
            writer.writerow((_sweep_label(value), str(algorithm), format_float(level)))
    return buf.getvalue()


def emit_sweep_results(param: str, results: list, manifest: RunManifest, destination, plot_data: bool = False) -> list:
    """One CSV per sweep point plus ``summary.csv`` and ``manifest.json``."""
    destination = _prepare_destination(destination)
    written = []
    for value, trajectories in results:
        stem = f"mse_{param}_{_sweep_label(value)}"
        path = destination / f"{stem}.csv"
        _atomic_write(path, results_csv(trajectories))
        written.append(path)
        if plot_data:
            plot_path = destination / f"plot_data_{param}_{_sweep_label(value)}.csv"
            _atomic_write(plot_path, plot_data_csv(trajectories))
            written.append(plot_path)
    summary = destination / "summary.csv"
    _atomic_write(summary, summary_csv(param, results))
    written.append(summary)
    manifest.outputs = [p.name for p in written]
    manifest_path = destination / "manifest.json"
    _atomic_write(manifest_path, json.dumps(manifest.to_dict(), indent=2) + "\n")
    return written + [manifest_path]


def _default_out(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results")) / name


def _load_source(path: str):
    """Config file (TOML) or a previous ``manifest.json``; returns (config, manifest-dict or None)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if p.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed manifest {path}: {exc}") from None
        return RunManifest.from_dict(data).config, data
    return load_config(p), None


def _apply_flags(config: ScenarioConfig, args) -> ScenarioConfig:
    overrides = {}
    for flag, key in (("seed", "seed"), ("runs", "runs"), ("iterations", "iterations")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    for item in getattr(args, "set", None) or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = _parse_scalar(raw.strip())
    return apply_overrides(config, **overrides) if overrides else config


def _parse_scalar(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def _report(trajectories):
    for algorithm, traj in trajectories.items():
        if len(traj):
            level = steady_state_mse(traj, STEADY_STATE_TAIL)
            print(f"  {algorithm.value:8s} steady-state {level:8.2f} dB  ({traj.diverged_runs} diverged)")
        else:
            print(f"  {algorithm.value:8s} all {traj.num_runs} runs diverged")


def _all_diverged(trajectories) -> bool:
    return all(len(t) == 0 for t in trajectories.values())


def _run_single(config, args, preset=None) -> int:
    out = Path(args.out) if args.out else _default_out(preset or "run")
    log.info("running %d trials x %d iterations", config.num_runs, config.iterations)
    trajectories = run_monte_carlo(config, workers=args.workers)
    manifest = RunManifest(config, preset=preset)
    paths = emit_results(trajectories, manifest, out, plot_data=args.plot_data)
    _report(trajectories)
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_DIVERGED if _all_diverged(trajectories) else EXIT_OK


def _run_sweep(config, param, values, args, preset=None) -> int:
    out = Path(args.out) if args.out else _default_out(f"{preset or 'sweep'}_{param}")
    points = [(v, apply_overrides(config, **{param: v})) for v in values]
    results = []
    for value, point in points:
        print(f"{param} = {_sweep_label(value)}")
        trajectories = run_monte_carlo(point, workers=args.workers)
        _report(trajectories)
        results.append((value, trajectories))
    manifest = RunManifest(config, preset=preset, sweep={"param": param, "values": list(values)})
    paths = emit_sweep_results(param, results, manifest, out, plot_data=args.plot_data)
    print(f"wrote {len(paths)} files to {out}")
    return EXIT_DIVERGED if all(_all_diverged(t) for _, t in results) else EXIT_OK


def cmd_list_presets(args) -> int:
    for name, preset in list_presets().items():
        print(f"{name:6s} {preset.description}")
    return EXIT_OK


def cmd_preset(args) -> int:
    preset = get_preset(args.name)
    config = _apply_flags(preset.config, args)
    if preset.sweep is not None:
        param, values = preset.sweep
        return _run_sweep(config, param, values, args, preset=preset.name)
    return _run_single(config, args, preset=preset.name)


def cmd_run(args) -> int:
    config, manifest = _load_source(args.config)
    config = _apply_flags(config, args)
    if manifest and manifest.get("sweep"):
        sweep = manifest["sweep"]
        return _run_sweep(config, sweep["param"], sweep["values"], args, preset=manifest.get("preset"))
    return _run_single(config, args, preset=manifest.get("preset") if manifest else None)


def cmd_sweep(args) -> int:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        config, _ = _load_source(args.config)
    elif args.preset:
        config = get_preset(args.preset).config
    else:
        config = config_from_mapping({})
    config = _apply_flags(config, args)
    values = [_parse_scalar(v) for v in args.values]
    return _run_sweep(config, args.param, values, args, preset=args.preset)


def _common(parser):
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--runs", type=int, help="number of Monte-Carlo runs")
    parser.add_argument("--iterations", type=int, help="iterations per run")
    parser.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or ./results)")
    parser.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on this)")
    parser.add_argument("--plot-data", action="store_true", help="also write a wide iteration-vs-dB table")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rl1lae", description="Sparse adaptive channel estimation under impulsive noise")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-presets", help="show the figure presets")
    p.set_defaults(func=cmd_list_presets)

    p = sub.add_parser("preset", help="run a figure preset")
    p.add_argument("name")
    _common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("run", help="run a scenario file or replay a manifest.json")
    p.add_argument("config")
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep one config key")
    p.add_argument("--param", required=True)
    p.add_argument("--values", nargs="+", required=True)
    p.add_argument("--config")
    p.add_argument("--preset")
    _common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
