"""Market simulator for auction-based allocation of edge-server resources
to generative-AI model owners.

Model owners submit multidimensional sealed bids (price plus latency,
resource cost, and per-task performance) for the right to deploy on an
edge server for one time window. The auctioneer scores each bid as a
weighted sum of the model's basic value and its execution values on the
currently requested tasks, picks the highest score, and charges the price
submitted by the second-ranked bidder. A plain second-price auction serves
as the baseline, and a Monte Carlo engine sweeps model sizes to compare
revenue and social welfare between the two.
"""

__version__ = "0.1.0"

from .engine import (
    CurvePoint,
    ExperimentConfig,
    RevenueCurve,
    RoundResult,
    derive_stream,
    run_round,
    sweep_sizes,
)
from .feedback import (
    HistoryLoadError,
    load_history,
    persist_history,
    synthesize_feedback,
    update_scoring,
)
from .market import (
    AuctionOutcome,
    EdgeServerCapacity,
    FeedbackReport,
    LedgerEntry,
    Mechanism,
    ModelBid,
    ModelProfile,
    ProfileViolation,
    ResourceVector,
    ScoringSystem,
    Tier,
    validate_profile,
)
from .mechanisms import (
    compute_score,
    feasible,
    run_second_price,
    run_second_score,
    welfare,
)
from .population import (
    CatalogEntry,
    ModelFamily,
    PopulationConfig,
    generate_profile,
    load_catalog,
    price_from_value,
    sample_market,
    tier_to_cost,
)

__all__ = [
    "AuctionOutcome",
    "CatalogEntry",
    "CurvePoint",
    "EdgeServerCapacity",
    "ExperimentConfig",
    "FeedbackReport",
    "HistoryLoadError",
    "LedgerEntry",
    "Mechanism",
    "ModelBid",
    "ModelFamily",
    "ModelProfile",
    "PopulationConfig",
    "ProfileViolation",
    "ResourceVector",
    "RevenueCurve",
    "RoundResult",
    "ScoringSystem",
    "Tier",
    "compute_score",
    "derive_stream",
    "feasible",
    "generate_profile",
    "load_catalog",
    "load_history",
    "persist_history",
    "price_from_value",
    "run_round",
    "run_second_price",
    "run_second_score",
    "sample_market",
    "sweep_sizes",
    "synthesize_feedback",
    "tier_to_cost",
    "update_scoring",
    "validate_profile",
    "welfare",
]
