"""Domain types for the edge-server model market.

Value objects shared by every other module: model profiles and bids, the
edge server's capacity, the auctioneer's scoring state, user feedback
reports, and per-round auction outcomes. All types are immutable once
constructed; evolving the scoring state produces a new value rather than
mutating in place, so snapshots can be shared freely across concurrent
replications.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional

# Tasks are identified by a plain non-negative integer index into a fixed
# universe {0, ..., universe_size - 1}; a request set is just a frozenset
# of those indices.
TaskId = int
TaskRequestSet = frozenset

# Hard bounds on model valuations, shared by validation and generation.
BASIC_VALUE_MIN = 0.0
BASIC_VALUE_MAX = 10.0
EXECUTION_VALUE_MIN = 0.0
EXECUTION_VALUE_MAX = 1.0

# Clearing payment when a round has no competition.
RESERVE_PRICE = 0.0


class Tier(str, enum.Enum):
    """Qualitative latency or resource-cost tier of a model."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class Mechanism(str, enum.Enum):
    """Allocation rules the simulator can run."""

    SECOND_SCORE = "second_score"
    SECOND_PRICE = "second_price"


@dataclass(frozen=True)
class ResourceVector:
    """Memory, compute, and bandwidth amounts in abstract units.

    Used both for a model's execution cost and for an edge server's
    available capacity.
    """

    memory_units: float = 0.0
    compute_units: float = 0.0
    bandwidth_units: float = 0.0

    def __post_init__(self) -> None:
        for name in ("memory_units", "compute_units", "bandwidth_units"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")

    def fits_within(self, capacity: "ResourceVector") -> bool:
        """Component-wise fit, inclusive at equality."""
        return (
            self.memory_units <= capacity.memory_units
            and self.compute_units <= capacity.compute_units
            and self.bandwidth_units <= capacity.bandwidth_units
        )


EdgeServerCapacity = ResourceVector


@dataclass(frozen=True)
class ModelProfile:
    """A generative model's intrinsic properties.

    ``capabilities`` maps each downstream task the model can tackle to its
    execution value on that task. Under the size scaling law a model of
    ``size_billions`` parameters tackles exactly ``size_billions ** 2``
    tasks; that, together with the value ranges, is checked by
    :func:`validate_profile` rather than at construction so that invalid
    candidates can be inspected and reported.
    """

    owner_id: int
    size_billions: int
    basic_value: float
    capabilities: Mapping[TaskId, float]
    latency_tier: Tier = Tier.MEDIUM
    resource_cost: ResourceVector = ResourceVector()

    def total_value(self) -> float:
        """Basic value plus execution value summed over every capability."""
        return self.basic_value + sum(self.capabilities.values())


@dataclass(frozen=True)
class ModelBid:
    """A multidimensional bid: the price offered plus the model's attributes."""

    profile: ModelProfile
    price: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.price) and self.price >= 0.0):
            raise ValueError(f"bid price must be finite and non-negative, got {self.price!r}")


@dataclass(frozen=True)
class FeedbackReport:
    """One round's user evaluation of the deployed model.

    ``user_acceptance`` is the subjective signal, ``content_quality`` the
    objective one; both live in [0, 1].
    """

    owner_id: int
    round_index: int
    user_acceptance: float
    content_quality: float

    def __post_init__(self) -> None:
        if self.round_index < 0:
            raise ValueError(f"round_index must be non-negative, got {self.round_index!r}")
        for name in ("user_acceptance", "content_quality"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ScoringSystem:
    """The auctioneer's weights and feedback state.

    A bid's score is::

        multiplier(owner) * (basic_weight * basic_value
                             + execution_weight * E
                             + price_weight * price)

    where ``E`` sums the bid's execution values over the currently requested
    tasks (divided by the request count when ``normalize_by_request_count``
    is set). Owners without feedback history score with a neutral multiplier
    of 1.0; accumulated multipliers are kept inside
    [``feedback_floor``, ``feedback_ceiling``] and the report history is
    append-only.
    """

    basic_weight: float = 1.0
    execution_weight: float = 1.0
    price_weight: float = 0.0
    normalize_by_request_count: bool = False
    feedback_multiplier: Mapping[int, float] = field(default_factory=dict)
    feedback_floor: float = 0.5
    feedback_ceiling: float = 1.5
    ema_alpha: float = 0.2
    history: tuple[FeedbackReport, ...] = ()

    def __post_init__(self) -> None:
        for name in ("basic_weight", "execution_weight", "price_weight"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")
        if self.basic_weight + self.execution_weight <= 0.0:
            raise ValueError("basic_weight + execution_weight must be positive")
        if not (0.0 < self.feedback_floor <= 1.0 <= self.feedback_ceiling):
            raise ValueError(
                "feedback bounds must satisfy 0 < floor <= 1 <= ceiling, got "
                f"floor={self.feedback_floor!r} ceiling={self.feedback_ceiling!r}"
            )
        if not (0.0 <= self.ema_alpha <= 1.0):
            raise ValueError(f"ema_alpha must be in [0, 1], got {self.ema_alpha!r}")
        for owner, multiplier in self.feedback_multiplier.items():
            if not (self.feedback_floor <= multiplier <= self.feedback_ceiling):
                raise ValueError(
                    f"multiplier for owner {owner} is {multiplier!r}, outside "
                    f"[{self.feedback_floor!r}, {self.feedback_ceiling!r}]"
                )

    def multiplier_for(self, owner_id: int) -> float:
        """Feedback multiplier for an owner, 1.0 when unseen."""
        return self.feedback_multiplier.get(owner_id, 1.0)


class LedgerEntry(NamedTuple):
    """One row of an outcome's ranked ledger."""

    owner_id: int
    score: float
    price: float


@dataclass(frozen=True)
class AuctionOutcome:
    """Winner, payment, and the full ranking for one auction round.

    ``ranked_ledger`` holds exactly the feasible bids, ordered by the
    mechanism's ranking key descending with ties broken by ascending owner
    id. For the price-ranked mechanism the ledger's score column repeats
    the price (its ranking key).
    """

    mechanism: Mechanism
    winner: Optional[int]
    payment: float
    ranked_ledger: tuple[LedgerEntry, ...]
    feasible_count: int

    def __post_init__(self) -> None:
        if (self.winner is None) != (self.feasible_count == 0):
            raise ValueError("winner must be absent exactly when no bid is feasible")
        if not (math.isfinite(self.payment) and self.payment >= 0.0):
            raise ValueError(f"payment must be finite and non-negative, got {self.payment!r}")
        if len(self.ranked_ledger) != self.feasible_count:
            raise ValueError("ranked_ledger must contain exactly the feasible bids")
        if self.winner is None and self.payment != RESERVE_PRICE:
            raise ValueError("a round without feasible bids pays nothing")
        if self.feasible_count == 1 and self.payment != RESERVE_PRICE:
            raise ValueError("a single-bidder round clears at the reserve price")
        if self.winner is not None and self.ranked_ledger[0].owner_id != self.winner:
            raise ValueError("winner must appear at rank 1 of the ledger")
        for above, below in zip(self.ranked_ledger, self.ranked_ledger[1:]):
            in_order = above.score > below.score or (
                above.score == below.score and above.owner_id < below.owner_id
            )
            if not in_order:
                raise ValueError("ranked_ledger must be sorted by score desc, owner asc")


class ProfileViolation(str, enum.Enum):
    """Identifiers for the invariants :func:`validate_profile` can report."""

    CAPABILITY_COUNT_MISMATCH = "capability-count-mismatch"
    BASIC_VALUE_OUT_OF_RANGE = "basic-value-out-of-range"
    EXECUTION_VALUE_OUT_OF_RANGE = "execution-value-out-of-range"
    TASK_ID_OVERFLOW = "task-id-overflow"


def validate_profile(profile: ModelProfile, universe_size: int) -> Optional[ProfileViolation]:
    """Check a profile against the scaling law and the market's value ranges.

    Returns ``None`` when every invariant holds, otherwise the first violated
    invariant's identifier: the capability count must equal
    ``size_billions ** 2``, the basic value must lie in [0, 10], every
    execution value in [0, 1], and every task id inside the universe.
    """
    expected = profile.size_billions ** 2
    if len(profile.capabilities) != expected:
        return ProfileViolation.CAPABILITY_COUNT_MISMATCH
    if not (BASIC_VALUE_MIN <= profile.basic_value <= BASIC_VALUE_MAX):
        return ProfileViolation.BASIC_VALUE_OUT_OF_RANGE
    for value in profile.capabilities.values():
        if not (EXECUTION_VALUE_MIN <= value <= EXECUTION_VALUE_MAX):
            return ProfileViolation.EXECUTION_VALUE_OUT_OF_RANGE
    for task in profile.capabilities:
        if not (0 <= task < universe_size):
            return ProfileViolation.TASK_ID_OVERFLOW
    return None
