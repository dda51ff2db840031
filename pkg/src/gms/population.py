"""Random market generation.

Each owner's model tackles ``size_billions ** 2`` downstream tasks drawn
uniformly without replacement from a fixed task universe; execution values
and basic values are uniform on their configured ranges; the submitted
price is a random fraction (gamma) of the model's total value, which is
what makes market revenue track model size. Generation is pure given an
explicit numpy random stream.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .market import (
    BASIC_VALUE_MAX,
    BASIC_VALUE_MIN,
    EXECUTION_VALUE_MAX,
    EXECUTION_VALUE_MIN,
    EdgeServerCapacity,
    ModelBid,
    ModelProfile,
    ResourceVector,
    TaskRequestSet,
    Tier,
)

# Universe of 100 tasks supports model sizes up to 10 (10^2 capabilities).
DEFAULT_UNIVERSE_SIZE = 100

# Roomy enough that every cost tier fits at every size; constrained presets
# override this to exercise the feasibility filter.
DEFAULT_CAPACITY = EdgeServerCapacity(10.0, 10.0, 10.0)

_TIER_UNIT_COST = {Tier.LOW: 1.0, Tier.MEDIUM: 2.0, Tier.HIGH: 3.0}


class ModelFamily(str, enum.Enum):
    GAN = "GAN"
    VAE = "VAE"
    DIFFUSION = "diffusion"
    TRANSFORMER = "transformer"


@dataclass(frozen=True)
class CatalogEntry:
    """Named model archetype carrying its latency and cost tiers."""

    name: str
    family: ModelFamily
    latency_tier: Tier
    cost_tier: Tier


@dataclass(frozen=True)
class PopulationConfig:
    """Knobs for one market's random population."""

    n_owners: int = 10
    size_billions: int = 1
    universe_size: int = DEFAULT_UNIVERSE_SIZE
    basic_value_range: tuple[float, float] = (BASIC_VALUE_MIN, BASIC_VALUE_MAX)
    execution_value_range: tuple[float, float] = (EXECUTION_VALUE_MIN, EXECUTION_VALUE_MAX)
    gamma_range: tuple[float, float] = (0.5, 1.0)
    request_fraction: float = 0.5
    capacity: EdgeServerCapacity = DEFAULT_CAPACITY
    catalog: tuple[CatalogEntry, ...] | None = None
    # When set, one execution value is drawn per task per market and shared
    # by every model that tackles the task, instead of per (model, task).
    shared_task_values: bool = False

    def __post_init__(self) -> None:
        if self.n_owners < 1:
            raise ValueError(f"n_owners must be >= 1, got {self.n_owners!r}")
        if self.size_billions < 1:
            raise ValueError(f"size_billions must be >= 1, got {self.size_billions!r}")
        if self.universe_size < 1:
            raise ValueError(f"universe_size must be >= 1, got {self.universe_size!r}")
        _check_range("basic_value_range", self.basic_value_range, BASIC_VALUE_MIN, BASIC_VALUE_MAX)
        _check_range(
            "execution_value_range",
            self.execution_value_range,
            EXECUTION_VALUE_MIN,
            EXECUTION_VALUE_MAX,
        )
        lo, hi = self.gamma_range
        if not (0.0 <= lo <= hi):
            raise ValueError(f"gamma_range must be well-ordered and non-negative, got {self.gamma_range!r}")
        if not (0.0 < self.request_fraction <= 1.0):
            raise ValueError(f"request_fraction must be in (0, 1], got {self.request_fraction!r}")
        if self.catalog is not None and len(self.catalog) == 0:
            raise ValueError("catalog must be None or non-empty")


def _check_range(name: str, bounds: tuple[float, float], domain_lo: float, domain_hi: float) -> None:
    lo, hi = bounds
    if not (domain_lo <= lo <= hi <= domain_hi):
        raise ValueError(
            f"{name} must satisfy {domain_lo} <= lo <= hi <= {domain_hi}, got {bounds!r}"
        )


def tier_to_cost(tier: Tier) -> float:
    """Unit resource cost of a tier: low 1.0, medium 2.0, high 3.0."""
    return _TIER_UNIT_COST[tier]


def generate_profile(
    owner_id: int,
    size_billions: int,
    cfg: PopulationConfig,
    rng: np.random.Generator,
    task_values: np.ndarray | None = None,
) -> ModelProfile:
    """Draw one model profile.

    Capabilities are ``size_billions ** 2`` distinct task ids drawn
    uniformly; each gets an execution value from the configured range
    (or from ``task_values`` in shared mode). The cost vector applies the
    catalog cost tier's unit cost, scaled by size_billions / 10, uniformly
    to all three resource components. Owners are assigned catalog entries
    round-robin when a catalog is configured, and default to the medium
    tiers otherwise.
    """
    n_tasks = size_billions ** 2
    if n_tasks > cfg.universe_size:
        raise ValueError(
            f"size {size_billions} needs {n_tasks} tasks but the universe has {cfg.universe_size}"
        )
    ids = rng.choice(cfg.universe_size, size=n_tasks, replace=False).tolist()
    if task_values is None:
        lo, hi = cfg.execution_value_range
        values = rng.uniform(lo, hi, size=n_tasks).tolist()
        capabilities = dict(zip(ids, values))
    else:
        capabilities = {task: float(task_values[task]) for task in ids}
    lo, hi = cfg.basic_value_range
    basic_value = float(rng.uniform(lo, hi))

    if cfg.catalog is not None:
        entry = cfg.catalog[owner_id % len(cfg.catalog)]
        latency_tier, cost_tier = entry.latency_tier, entry.cost_tier
    else:
        latency_tier, cost_tier = Tier.MEDIUM, Tier.MEDIUM
    unit = tier_to_cost(cost_tier) * size_billions / 10.0
    return ModelProfile(
        owner_id=owner_id,
        size_billions=size_billions,
        basic_value=basic_value,
        capabilities=capabilities,
        latency_tier=latency_tier,
        resource_cost=ResourceVector(unit, unit, unit),
    )


def price_from_value(profile: ModelProfile, gamma: float) -> float:
    """Bid price as a fraction gamma of the model's total value."""
    return gamma * profile.total_value()


def sample_market(
    cfg: PopulationConfig, rng: np.random.Generator
) -> tuple[list[ModelBid], TaskRequestSet]:
    """Draw one full market: ``n_owners`` bids plus the round's request set.

    The draw order (per owner: capability ids, execution values, basic
    value, gamma; then the request set) is part of the determinism
    contract: the same stream always yields the same market.
    """
    task_values = None
    if cfg.shared_task_values:
        lo, hi = cfg.execution_value_range
        task_values = rng.uniform(lo, hi, size=cfg.universe_size)
    bids = []
    for owner_id in range(cfg.n_owners):
        profile = generate_profile(owner_id, cfg.size_billions, cfg, rng, task_values)
        gamma = float(rng.uniform(*cfg.gamma_range))
        bids.append(ModelBid(profile, price_from_value(profile, gamma)))
    n_requests = int(round(cfg.request_fraction * cfg.universe_size))
    requested = rng.choice(cfg.universe_size, size=n_requests, replace=False)
    return bids, frozenset(requested.tolist())


def load_catalog(path: str | Path) -> tuple[CatalogEntry, ...]:
    """Read a model catalog from a JSON list of {name, family, latency, cost}."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, list):
        raise ValueError(f"catalog file {path} must contain a JSON list")
    entries = []
    for index, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ValueError(f"catalog entry {index} must be an object")
        unknown = set(item) - {"name", "family", "latency", "cost"}
        if unknown:
            raise ValueError(f"catalog entry {index} has unknown fields: {sorted(unknown)}")
        try:
            entries.append(
                CatalogEntry(
                    name=str(item["name"]),
                    family=ModelFamily(item["family"]),
                    latency_tier=Tier(item["latency"]),
                    cost_tier=Tier(item["cost"]),
                )
            )
        except KeyError as exc:
            raise ValueError(f"catalog entry {index} is missing field {exc}") from exc
        except ValueError as exc:
            raise ValueError(f"catalog entry {index}: {exc}") from exc
    return tuple(entries)
