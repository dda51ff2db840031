"""Command-line front door.

Two subcommands: ``sweep`` runs the size sweep and writes
``revenue_curve.csv`` plus ``manifest.json``; ``round`` runs a single
auction round and emits a step-by-step JSON trace (bids, scores,
feasibility, ranking, winner, payment, feedback). Flag values override
config-file values, which override the built-in defaults. All output
files are written atomically. Exit codes: 0 success, 2 configuration
error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .engine import ExperimentConfig, RevenueCurve, derive_stream, run_round, sweep_sizes
from .market import EdgeServerCapacity, Mechanism, ScoringSystem
from .mechanisms import compute_score, feasible
from .population import CatalogEntry, PopulationConfig, load_catalog

ENV_OUTPUT_DIR = "GMS_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


class ConfigError(Exception):
    """Configuration could not be loaded or is invalid."""


_CAPACITY_KEYS = ("memory_units", "compute_units", "bandwidth_units")
_SCORING_KEYS = (
    "basic_weight",
    "execution_weight",
    "price_weight",
    "normalize_by_request_count",
    "feedback_floor",
    "feedback_ceiling",
    "ema_alpha",
)
_POPULATION_KEYS = (
    "owners",
    "universe_size",
    "basic_value_range",
    "execution_value_range",
    "gamma_range",
    "request_fraction",
    "shared_task_values",
    "capacity",
    "catalog",
)
_EXPERIMENT_KEYS = (
    "sizes",
    "replications",
    "rounds_per_replication",
    "mechanisms",
    "master_seed",
    "feedback_enabled",
    "scoring",
)


def _as_pair(name: str, value) -> tuple[float, float]:
    if not (isinstance(value, list) and len(value) == 2):
        raise ConfigError(f"field {name!r} must be a two-element [lo, hi] list, got {value!r}")
    return (float(value[0]), float(value[1]))


def _parse_mechanisms(values) -> tuple[Mechanism, ...]:
    if not isinstance(values, list):
        raise ConfigError(f"field 'mechanisms' must be a list, got {values!r}")
    parsed = []
    for value in values:
        try:
            parsed.append(Mechanism(value))
        except ValueError:
            known = ", ".join(m.value for m in Mechanism)
            raise ConfigError(f"unknown mechanism {value!r}; expected one of: {known}") from None
    # Normalized name order keeps the digest independent of listing order.
    return tuple(sorted(set(parsed), key=lambda m: m.value))


def config_from_dict(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed JSON object.

    Unspecified fields take the default preset's values; unknown fields are
    a hard error. ``catalog`` is a file path, resolved against ``base_dir``.
    """
    try:
        return _build_config(raw, base_dir)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def _build_config(raw: dict, base_dir: Path | None) -> ExperimentConfig:
    known = set(_POPULATION_KEYS) | set(_EXPERIMENT_KEYS)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")

    population_kwargs = {}
    if "owners" in raw:
        population_kwargs["n_owners"] = int(raw["owners"])
    if "universe_size" in raw:
        population_kwargs["universe_size"] = int(raw["universe_size"])
    if "basic_value_range" in raw:
        population_kwargs["basic_value_range"] = _as_pair("basic_value_range", raw["basic_value_range"])
    if "execution_value_range" in raw:
        population_kwargs["execution_value_range"] = _as_pair(
            "execution_value_range", raw["execution_value_range"]
        )
    if "gamma_range" in raw:
        population_kwargs["gamma_range"] = _as_pair("gamma_range", raw["gamma_range"])
    if "request_fraction" in raw:
        population_kwargs["request_fraction"] = float(raw["request_fraction"])
    if "shared_task_values" in raw:
        population_kwargs["shared_task_values"] = bool(raw["shared_task_values"])
    if "capacity" in raw:
        capacity = raw["capacity"]
        if not isinstance(capacity, dict):
            raise ConfigError(f"field 'capacity' must be an object, got {capacity!r}")
        unknown = set(capacity) - set(_CAPACITY_KEYS)
        if unknown:
            raise ConfigError(f"unknown capacity fields: {', '.join(sorted(unknown))}")
        population_kwargs["capacity"] = EdgeServerCapacity(
            **{key: float(value) for key, value in capacity.items()}
        )
    if "catalog" in raw and raw["catalog"] is not None:
        catalog_path = Path(raw["catalog"])
        if base_dir is not None and not catalog_path.is_absolute():
            catalog_path = base_dir / catalog_path
        try:
            population_kwargs["catalog"] = load_catalog(catalog_path)
        except FileNotFoundError:
            raise ConfigError(f"catalog file not found: {catalog_path}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    scoring_kwargs = {}
    if "scoring" in raw:
        scoring = raw["scoring"]
        if not isinstance(scoring, dict):
            raise ConfigError(f"field 'scoring' must be an object, got {scoring!r}")
        unknown = set(scoring) - set(_SCORING_KEYS)
        if unknown:
            raise ConfigError(f"unknown scoring fields: {', '.join(sorted(unknown))}")
        scoring_kwargs = dict(scoring)

    experiment_kwargs = {}
    if "sizes" in raw:
        sizes = raw["sizes"]
        if not isinstance(sizes, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in sizes
        ):
            raise ConfigError(f"field 'sizes' must be a list of integers, got {sizes!r}")
        experiment_kwargs["sizes"] = tuple(sorted(set(sizes)))
    if "replications" in raw:
        experiment_kwargs["replications"] = int(raw["replications"])
    if "rounds_per_replication" in raw:
        experiment_kwargs["rounds_per_replication"] = int(raw["rounds_per_replication"])
    if "mechanisms" in raw:
        experiment_kwargs["mechanisms"] = _parse_mechanisms(raw["mechanisms"])
    if "master_seed" in raw:
        experiment_kwargs["master_seed"] = int(raw["master_seed"])
    if "feedback_enabled" in raw:
        experiment_kwargs["feedback_enabled"] = bool(raw["feedback_enabled"])

    return ExperimentConfig(
        population=PopulationConfig(**population_kwargs),
        scoring=ScoringSystem(**scoring_kwargs),
        **experiment_kwargs,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a JSON experiment config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config root must be a JSON object")
    return config_from_dict(raw, base_dir=path.parent)


def _catalog_to_list(catalog: tuple[CatalogEntry, ...] | None):
    if catalog is None:
        return None
    return [
        {
            "name": entry.name,
            "family": entry.family.value,
            "latency": entry.latency_tier.value,
            "cost": entry.cost_tier.value,
        }
        for entry in catalog
    ]


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Canonical JSON-ready form of a resolved config (digest input)."""
    population = cfg.population
    scoring = cfg.scoring
    return {
        "owners": population.n_owners,
        "sizes": list(cfg.sizes),
        "replications": cfg.replications,
        "rounds_per_replication": cfg.rounds_per_replication,
        "mechanisms": sorted(m.value for m in cfg.mechanisms),
        "master_seed": cfg.master_seed,
        "feedback_enabled": cfg.feedback_enabled,
        "universe_size": population.universe_size,
        "basic_value_range": list(population.basic_value_range),
        "execution_value_range": list(population.execution_value_range),
        "gamma_range": list(population.gamma_range),
        "request_fraction": population.request_fraction,
        "shared_task_values": population.shared_task_values,
        "capacity": {
            "memory_units": population.capacity.memory_units,
            "compute_units": population.capacity.compute_units,
            "bandwidth_units": population.capacity.bandwidth_units,
        },
        "catalog": _catalog_to_list(population.catalog),
        "scoring": {key: getattr(scoring, key) for key in _SCORING_KEYS},
    }


def config_digest(cfg: ExperimentConfig) -> str:
    """Content hash of the resolved config; stable under file-key reordering."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.chmod(tmp_name, 0o644)  # mkstemp defaults to 0600
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def curve_to_csv(curve: RevenueCurve) -> str:
    """Render the curve with the fixed header, rows sorted by (size, mechanism)."""
    lines = ["size_billions,mechanism,mean_revenue,revenue_stderr,mean_welfare,replications"]
    for p in curve.points:
        lines.append(
            f"{p.size_billions},{p.mechanism.value},{p.mean_revenue!r},"
            f"{p.revenue_stderr!r},{p.mean_welfare!r},{p.replications}"
        )
    return "\n".join(lines) + "\n"


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    try:
        if args.seed is not None:
            cfg = replace(cfg, master_seed=args.seed)
        if getattr(args, "replications", None) is not None:
            cfg = replace(cfg, replications=args.replications)
        if args.owners is not None:
            cfg = replace(cfg, population=replace(cfg.population, n_owners=args.owners))
        if args.mechanism is not None:
            cfg = replace(cfg, mechanisms=(Mechanism(args.mechanism),))
        if args.size is not None and args.command == "sweep":
            cfg = replace(cfg, sizes=(args.size,))
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return cfg


def _resolve_output_dir(args: argparse.Namespace) -> Path:
    out = args.output or os.environ.get(ENV_OUTPUT_DIR) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(path: Path, cfg: ExperimentConfig, outputs: dict[str, str]) -> None:
    manifest = {
        "config_digest": config_digest(cfg),
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "outputs": outputs,
        "config": config_to_dict(cfg),
    }
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out_dir = _resolve_output_dir(args)
    curve = sweep_sizes(cfg, workers=args.workers)
    csv_path = out_dir / "revenue_curve.csv"
    _atomic_write(csv_path, curve_to_csv(curve))
    manifest_path = out_dir / "manifest.json"
    _write_manifest(manifest_path, cfg, {"revenue_curve": str(csv_path)})
    print(f"wrote {csv_path} ({len(curve.points)} rows) and {manifest_path}")
    return EXIT_OK


def _bid_trace(bid, requests, capacity, scoring) -> dict:
    profile = bid.profile
    return {
        "owner_id": profile.owner_id,
        "price": bid.price,
        "score": compute_score(bid, requests, scoring),
        "feasible": feasible(bid, capacity),
        "size_billions": profile.size_billions,
        "basic_value": profile.basic_value,
        "latency_tier": profile.latency_tier.value,
        "resource_cost": {
            "memory_units": profile.resource_cost.memory_units,
            "compute_units": profile.resource_cost.compute_units,
            "bandwidth_units": profile.resource_cost.bandwidth_units,
        },
    }


def cmd_round(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out_dir = _resolve_output_dir(args)
    size = args.size if args.size is not None else cfg.sizes[0]
    if size ** 2 > cfg.population.universe_size:
        raise ConfigError(
            f"size {size} needs {size ** 2} tasks but the universe has "
            f"{cfg.population.universe_size}"
        )
    stream = derive_stream(cfg.master_seed, size, 0, 0)
    result = run_round(cfg, size, stream, cfg.scoring)
    capacity = cfg.population.capacity
    trace = {
        "master_seed": cfg.master_seed,
        "size_billions": size,
        "config_digest": config_digest(cfg),
        "requests": sorted(result.requests),
        "bids": [_bid_trace(bid, result.requests, capacity, cfg.scoring) for bid in result.bids],
        "mechanisms": {
            mechanism.value: {
                "winner": outcome.winner,
                "payment": outcome.payment,
                "welfare": result.welfares[mechanism],
                "ranked_ledger": [
                    {"owner_id": e.owner_id, "score": e.score, "price": e.price}
                    for e in outcome.ranked_ledger
                ],
            }
            for mechanism, outcome in result.outcomes.items()
        },
        "feedback": None
        if result.feedback is None
        else {
            "owner_id": result.feedback.owner_id,
            "round_index": result.feedback.round_index,
            "user_acceptance": result.feedback.user_acceptance,
            "content_quality": result.feedback.content_quality,
        },
    }
    text = json.dumps(trace, indent=2)
    _atomic_write(out_dir / "round_trace.json", text + "\n")
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gms",
        description="Auction-based edge-resource market simulator for generative-AI models.",
    )
    parser.add_argument("--version", action="version", version=f"gms {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", metavar="PATH", help="JSON experiment config file")
        sub.add_argument("--seed", type=int, metavar="U64", help="override the master seed")
        sub.add_argument("--output", metavar="DIR", help=f"output directory (default ${ENV_OUTPUT_DIR} or .)")
        sub.add_argument(
            "--mechanism",
            choices=[m.value for m in Mechanism],
            help="restrict to a single mechanism",
        )
        sub.add_argument("--owners", type=int, metavar="N", help="override the number of model owners")
        sub.add_argument("--size", type=int, metavar="N", help="model size in billions of parameters")

    sweep = subparsers.add_parser("sweep", help="run the size sweep and write the revenue curve")
    add_common(sweep)
    sweep.add_argument("--replications", type=int, metavar="N", help="override the replication count")
    sweep.add_argument(
        "--workers",
        type=int,
        default=1,
        metavar="N",
        help="worker processes for replications (results are identical for any value)",
    )
    sweep.set_defaults(handler=cmd_sweep)

    round_cmd = subparsers.add_parser("round", help="run one auction round and print a JSON trace")
    add_common(round_cmd)
    round_cmd.set_defaults(handler=cmd_round)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"gms: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as exc:  # anything past config validation is a runtime failure
        print(f"gms: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
