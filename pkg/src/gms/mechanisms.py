"""Allocation and payment rules.

Pure functions only: the scoring rule, the score-ranked auction whose
winner pays the price submitted by the second-ranked bidder, a plain
second-price baseline, and the resource-feasibility filter. Ties break
deterministically by ascending owner id so that replications stay
reproducible; no function here holds state or draws randomness.
"""

from __future__ import annotations

from typing import Sequence

from .market import (
    RESERVE_PRICE,
    AuctionOutcome,
    EdgeServerCapacity,
    LedgerEntry,
    Mechanism,
    ModelBid,
    ScoringSystem,
    TaskRequestSet,
)


def feasible(bid: ModelBid, capacity: EdgeServerCapacity) -> bool:
    """True iff the bid's resource cost fits the server, inclusive at equality."""
    return bid.profile.resource_cost.fits_within(capacity)


def compute_score(bid: ModelBid, requests: TaskRequestSet, scoring: ScoringSystem) -> float:
    """Score a bid under the given scoring system.

    The execution term sums the bid's execution values over the requested
    tasks it can tackle (an empty request set contributes zero), optionally
    normalized by the request count. The weighted sum of basic value,
    execution term, and price is then scaled by the owner's feedback
    multiplier.
    """
    covered = 0.0
    for task, value in bid.profile.capabilities.items():
        if task in requests:
            covered += value
    if scoring.normalize_by_request_count and requests:
        covered /= len(requests)
    raw = (
        scoring.basic_weight * bid.profile.basic_value
        + scoring.execution_weight * covered
        + scoring.price_weight * bid.price
    )
    return scoring.multiplier_for(bid.profile.owner_id) * raw


def ranking_key(primary: float, owner_id: int) -> tuple[float, int]:
    """Sort key yielding primary-descending, owner-ascending order."""
    return (-primary, owner_id)


def _require_unique_owners(bids: Sequence[ModelBid]) -> None:
    seen: set[int] = set()
    for bid in bids:
        owner = bid.profile.owner_id
        if owner in seen:
            raise ValueError(f"duplicate owner_id {owner} in bid list")
        seen.add(owner)


def _settle(mechanism: Mechanism, entries: list[LedgerEntry]) -> AuctionOutcome:
    """Rank feasible entries and clear: rank 1 wins, rank 2's price is paid.

    With a single feasible bid the round clears at the reserve price; with
    none there is no winner.
    """
    ranked = tuple(sorted(entries, key=lambda e: ranking_key(e.score, e.owner_id)))
    if not ranked:
        return AuctionOutcome(mechanism, None, 0.0, (), 0)
    payment = ranked[1].price if len(ranked) > 1 else RESERVE_PRICE
    return AuctionOutcome(mechanism, ranked[0].owner_id, payment, ranked, len(ranked))


def run_second_score(
    bids: Sequence[ModelBid],
    requests: TaskRequestSet,
    capacity: EdgeServerCapacity,
    scoring: ScoringSystem,
) -> AuctionOutcome:
    """Run the score-ranked auction.

    Infeasible bids are dropped before ranking. The remaining bids are
    ranked by score descending (owner id ascending on ties); the top bidder
    wins and pays the price submitted by the second-ranked bidder, which is
    read from that bid directly and is therefore independent of the
    winner's own price.
    """
    _require_unique_owners(bids)
    entries = [
        LedgerEntry(bid.profile.owner_id, compute_score(bid, requests, scoring), bid.price)
        for bid in bids
        if feasible(bid, capacity)
    ]
    return _settle(Mechanism.SECOND_SCORE, entries)


def run_second_price(bids: Sequence[ModelBid], capacity: EdgeServerCapacity) -> AuctionOutcome:
    """Run the sealed-bid second-price baseline.

    Feasible bids are ranked by price descending (owner id ascending on
    ties); the highest price wins and pays the second-highest price. The
    ledger's score column carries the ranking key, i.e. the price.
    """
    _require_unique_owners(bids)
    entries = [
        LedgerEntry(bid.profile.owner_id, bid.price, bid.price)
        for bid in bids
        if feasible(bid, capacity)
    ]
    return _settle(Mechanism.SECOND_PRICE, entries)


def welfare(
    outcome: AuctionOutcome,
    bids: Sequence[ModelBid],
    requests: TaskRequestSet,
    scoring: ScoringSystem,
) -> float:
    """Realized allocative score of the winning bid, 0.0 when nothing cleared.

    The score-ranked mechanism maximizes this by construction, so it serves
    as the welfare proxy when comparing mechanisms on the same bid set.
    """
    if outcome.winner is None:
        return 0.0
    for bid in bids:
        if bid.profile.owner_id == outcome.winner:
            return compute_score(bid, requests, scoring)
    raise ValueError(f"winner {outcome.winner} not present in the given bids")
