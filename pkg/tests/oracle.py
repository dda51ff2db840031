"""Brute-force reference implementations used to cross-check the library.

Everything here is deliberately naive and shares no decision logic with the
package: scores are re-derived with plain loops, winners are found by linear
scans instead of sorting, and the revenue-trend oracle runs on the stdlib
``random`` module rather than numpy. Keep it slow and obvious.
"""

import random


def oracle_score(bid, requests, scoring):
    """Re-derive a bid's score directly from the scoring definition."""
    covered = 0.0
    for task in requests:
        if task in bid.profile.capabilities:
            covered = covered + bid.profile.capabilities[task]
    if scoring.normalize_by_request_count and len(requests) > 0:
        covered = covered / len(requests)
    value = (
        scoring.basic_weight * bid.profile.basic_value
        + scoring.execution_weight * covered
        + scoring.price_weight * bid.price
    )
    owner = bid.profile.owner_id
    if owner in scoring.feedback_multiplier:
        multiplier = scoring.feedback_multiplier[owner]
    else:
        multiplier = 1.0
    return multiplier * value


def _oracle_feasible(bid, capacity):
    cost = bid.profile.resource_cost
    if cost.memory_units > capacity.memory_units:
        return False
    if cost.compute_units > capacity.compute_units:
        return False
    if cost.bandwidth_units > capacity.bandwidth_units:
        return False
    return True


def _scan_best(keyed):
    """Linear argmax over (owner_id, key) pairs; lower owner wins exact ties."""
    best_owner = None
    best_key = None
    for owner, key in keyed:
        if best_owner is None:
            best_owner, best_key = owner, key
        elif key > best_key:
            best_owner, best_key = owner, key
        elif key == best_key and owner < best_owner:
            best_owner, best_key = owner, key
    return best_owner


def oracle_second_score(bids, requests, capacity, scoring):
    """(winner, payment) under the score-ranked rule, by exhaustive scan."""
    keyed = []
    prices = {}
    for bid in bids:
        if _oracle_feasible(bid, capacity):
            owner = bid.profile.owner_id
            keyed.append((owner, oracle_score(bid, requests, scoring)))
            prices[owner] = bid.price
    winner = _scan_best(keyed)
    if winner is None:
        return None, 0.0
    runner_up = _scan_best([(o, k) for o, k in keyed if o != winner])
    if runner_up is None:
        return winner, 0.0
    return winner, prices[runner_up]


def oracle_second_price(bids, capacity):
    """(winner, payment) under the price-ranked rule, by exhaustive scan."""
    keyed = []
    prices = {}
    for bid in bids:
        if _oracle_feasible(bid, capacity):
            owner = bid.profile.owner_id
            keyed.append((owner, bid.price))
            prices[owner] = bid.price
    winner = _scan_best(keyed)
    if winner is None:
        return None, 0.0
    runner_up = _scan_best([(o, k) for o, k in keyed if o != winner])
    if runner_up is None:
        return winner, 0.0
    return winner, prices[runner_up]


def oracle_max_feasible_score(bids, requests, capacity, scoring):
    """Highest score among feasible bids; 0.0 when none fit."""
    best = None
    for bid in bids:
        if _oracle_feasible(bid, capacity):
            score = oracle_score(bid, requests, scoring)
            if best is None or score > best:
                best = score
    return 0.0 if best is None else best


def oracle_mean_revenue(size_billions, n_owners, replications, seed):
    """Independent Monte Carlo estimate of mean second-price revenue.

    Stdlib RNG, same statistical population: basic value uniform on [0, 10],
    one uniform [0, 1] execution value per task with size^2 tasks per model,
    and price = gamma * (basic + sum of execution values), gamma uniform on
    [0.5, 1.0]. Revenue per round is the second-highest price.
    """
    rng = random.Random(seed)
    total = 0.0
    for _ in range(replications):
        prices = []
        for _ in range(n_owners):
            basic = rng.uniform(0.0, 10.0)
            executed = 0.0
            for _ in range(size_billions ** 2):
                executed = executed + rng.uniform(0.0, 1.0)
            gamma = rng.uniform(0.5, 1.0)
            prices.append(gamma * (basic + executed))
        first = max(prices)
        prices.remove(first)
        total = total + max(prices)
    return total / replications
