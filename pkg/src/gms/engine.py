"""Round and sweep orchestration.

One round samples a market and runs every configured mechanism on the same
bid set (a paired comparison, which removes sampling noise from the
mechanism contrast). A sweep repeats that over replications for each model
size and aggregates revenue and welfare into a curve. Every random draw
comes from a stream derived from (master_seed, size, replication, round),
so results are reproducible and replications can run in parallel without
changing them.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from math import sqrt
from typing import Mapping

import numpy as np

from .feedback import synthesize_feedback, update_scoring
from .market import AuctionOutcome, FeedbackReport, Mechanism, ModelBid, ScoringSystem
from .mechanisms import run_second_price, run_second_score, welfare
from .population import PopulationConfig, sample_market

DEFAULT_SIZES = tuple(range(1, 11))
DEFAULT_REPLICATIONS = 1000
DEFAULT_MASTER_SEED = 42

_UINT64_BOUND = 2 ** 64


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment.

    The defaults are the reference preset: 10 owners, sizes 1 through 10,
    1000 replications of a single round each, both mechanisms, and feedback
    frozen so every replication scores with the same neutral multipliers.
    """

    population: PopulationConfig = PopulationConfig()
    scoring: ScoringSystem = ScoringSystem()
    sizes: tuple[int, ...] = DEFAULT_SIZES
    replications: int = DEFAULT_REPLICATIONS
    rounds_per_replication: int = 1
    # Mechanism name order, matching the CSV sort and the config loader's
    # normalization.
    mechanisms: tuple[Mechanism, ...] = (Mechanism.SECOND_PRICE, Mechanism.SECOND_SCORE)
    master_seed: int = DEFAULT_MASTER_SEED
    feedback_enabled: bool = False

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ValueError("sizes must be non-empty")
        if any(size < 1 for size in self.sizes):
            raise ValueError(f"sizes must be positive, got {self.sizes!r}")
        if len(set(self.sizes)) != len(self.sizes):
            raise ValueError(f"sizes must be unique, got {self.sizes!r}")
        if max(self.sizes) ** 2 > self.population.universe_size:
            raise ValueError(
                f"size {max(self.sizes)} needs {max(self.sizes) ** 2} tasks but the "
                f"universe has {self.population.universe_size}"
            )
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications!r}")
        if self.rounds_per_replication < 1:
            raise ValueError(
                f"rounds_per_replication must be >= 1, got {self.rounds_per_replication!r}"
            )
        if not self.mechanisms:
            raise ValueError("mechanisms must be non-empty")
        if len(set(self.mechanisms)) != len(self.mechanisms):
            raise ValueError(f"mechanisms must be unique, got {self.mechanisms!r}")
        if not (0 <= self.master_seed < _UINT64_BOUND):
            raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")


@dataclass(frozen=True)
class CurvePoint:
    """Aggregated revenue and welfare for one (size, mechanism) cell."""

    size_billions: int
    mechanism: Mechanism
    mean_revenue: float
    revenue_stderr: float
    mean_welfare: float
    replications: int


@dataclass(frozen=True)
class RevenueCurve:
    """The sweep artifact: one point per (size, mechanism), sorted."""

    points: tuple[CurvePoint, ...]

    def point(self, size: int, mechanism: Mechanism) -> CurvePoint:
        for point in self.points:
            if point.size_billions == size and point.mechanism == mechanism:
                return point
        raise KeyError(f"no curve point for size {size}, mechanism {mechanism.value}")

    def revenues(self, mechanism: Mechanism) -> list[float]:
        """Mean revenue per size for one mechanism, in ascending size order."""
        selected = [p for p in self.points if p.mechanism == mechanism]
        return [p.mean_revenue for p in sorted(selected, key=lambda p: p.size_billions)]


@dataclass(frozen=True)
class RoundResult:
    """Everything one round produced, for aggregation and tracing."""

    bids: tuple[ModelBid, ...]
    requests: frozenset
    outcomes: Mapping[Mechanism, AuctionOutcome]
    welfares: Mapping[Mechanism, float]
    feedback: FeedbackReport | None
    scoring: ScoringSystem  # post-update scoring; equals the input when feedback is off
    size_billions: int = 0


def derive_stream(
    master_seed: int, size: int, replication_index: int, round_index: int
) -> np.random.Generator:
    """Deterministic, collision-avoiding random stream for one round.

    The four coordinates feed numpy's SeedSequence entropy pool, whose
    64-bit hash mixing keeps distinct coordinates on well-separated PCG64
    streams; identical coordinates always reproduce the same stream.
    """
    sequence = np.random.SeedSequence((master_seed, size, replication_index, round_index))
    return np.random.default_rng(sequence)


def run_round(
    cfg: ExperimentConfig,
    size: int,
    stream: np.random.Generator,
    scoring: ScoringSystem,
    round_index: int = 0,
) -> RoundResult:
    """Sample one market and run every configured mechanism on it.

    All mechanisms see the identical bid set. When feedback is enabled and
    the score-ranked mechanism produced a winner, the round also
    synthesizes a report and folds it into the returned scoring system.
    """
    population = replace(cfg.population, size_billions=size)
    bids, requests = sample_market(population, stream)
    outcomes: dict[Mechanism, AuctionOutcome] = {}
    welfares: dict[Mechanism, float] = {}
    for mechanism in cfg.mechanisms:
        if mechanism is Mechanism.SECOND_SCORE:
            outcome = run_second_score(bids, requests, population.capacity, scoring)
        else:
            outcome = run_second_price(bids, population.capacity)
        outcomes[mechanism] = outcome
        welfares[mechanism] = welfare(outcome, bids, requests, scoring)

    report = None
    updated = scoring
    scored_outcome = outcomes.get(Mechanism.SECOND_SCORE)
    if cfg.feedback_enabled and scored_outcome is not None and scored_outcome.winner is not None:
        winner_profile = next(
            bid.profile for bid in bids if bid.profile.owner_id == scored_outcome.winner
        )
        report = synthesize_feedback(scored_outcome, winner_profile, requests, stream, round_index)
        updated = update_scoring(scoring, report)

    return RoundResult(
        bids=tuple(bids),
        requests=requests,
        outcomes=outcomes,
        welfares=welfares,
        feedback=report,
        scoring=updated,
        size_billions=size,
    )


def _replication_samples(
    cfg: ExperimentConfig, size: int, replication_index: int
) -> list[list[tuple[float, float]]]:
    """(payment, welfare) per round per mechanism, in cfg.mechanisms order.

    Each replication starts from the configured scoring system; with
    feedback enabled the scoring lineage evolves across the replication's
    rounds but never leaks into other replications, which keeps them
    independent work units.
    """
    scoring = cfg.scoring
    samples = []
    for round_index in range(cfg.rounds_per_replication):
        stream = derive_stream(cfg.master_seed, size, replication_index, round_index)
        result = run_round(cfg, size, stream, scoring, round_index)
        scoring = result.scoring
        samples.append(
            [
                (result.outcomes[mechanism].payment, result.welfares[mechanism])
                for mechanism in cfg.mechanisms
            ]
        )
    return samples


def sweep_sizes(cfg: ExperimentConfig, workers: int = 1) -> RevenueCurve:
    """Run the full size sweep and aggregate the revenue curve.

    ``workers`` only distributes replications across processes; samples are
    always reduced in (replication, round) order, so the curve is identical
    for any worker count.
    """
    points = []
    for size in cfg.sizes:
        if workers > 1:
            chunksize = max(1, cfg.replications // (workers * 4))
            with ProcessPoolExecutor(max_workers=workers) as pool:
                per_replication = list(
                    pool.map(
                        partial(_replication_samples, cfg, size),
                        range(cfg.replications),
                        chunksize=chunksize,
                    )
                )
        else:
            per_replication = [
                _replication_samples(cfg, size, index) for index in range(cfg.replications)
            ]
        for position, mechanism in enumerate(cfg.mechanisms):
            payments = np.array(
                [
                    rounds[position][0]
                    for replication in per_replication
                    for rounds in replication
                ]
            )
            welfares = np.array(
                [
                    rounds[position][1]
                    for replication in per_replication
                    for rounds in replication
                ]
            )
            n = len(payments)
            stderr = float(payments.std(ddof=1) / sqrt(n)) if n > 1 else 0.0
            points.append(
                CurvePoint(
                    size_billions=size,
                    mechanism=mechanism,
                    mean_revenue=float(payments.mean()),
                    revenue_stderr=stderr,
                    mean_welfare=float(welfares.mean()),
                    replications=cfg.replications,
                )
            )
    points.sort(key=lambda p: (p.size_billions, p.mechanism.value))
    return RevenueCurve(points=tuple(points))
