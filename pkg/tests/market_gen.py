"""Random-market fixtures for mechanism tests.

Markets are assembled directly from numpy draws rather than through the
population module, so mechanism-level checks do not depend on the
generator under test. Capacities are tight enough that some bids are
infeasible, and a few owners carry non-neutral feedback multipliers.
"""

import numpy as np

from gms.market import ModelBid, ModelProfile, ResourceVector, ScoringSystem

UNIVERSE = 20


def random_market(rng, n_bidders=None):
    """One market: (bids, requests, capacity, scoring)."""
    n = int(n_bidders) if n_bidders is not None else int(rng.integers(2, 7))
    requests = frozenset(rng.choice(UNIVERSE, size=10, replace=False).tolist())
    bids = []
    for owner in range(n):
        n_caps = int(rng.integers(0, UNIVERSE + 1))
        ids = rng.choice(UNIVERSE, size=n_caps, replace=False).tolist()
        values = rng.uniform(0.0, 1.0, size=n_caps).tolist()
        cost = ResourceVector(*rng.uniform(0.0, 5.0, size=3).tolist())
        profile = ModelProfile(
            owner_id=owner,
            size_billions=1,
            basic_value=float(rng.uniform(0.0, 10.0)),
            capabilities=dict(zip(ids, values)),
            resource_cost=cost,
        )
        bids.append(ModelBid(profile, price=float(rng.uniform(0.0, 20.0))))
    capacity = ResourceVector(4.0, 4.0, 4.0)
    multipliers = {}
    for owner in range(n):
        if rng.random() < 0.3:
            multipliers[owner] = float(rng.uniform(0.5, 1.5))
    scoring = ScoringSystem(feedback_multiplier=multipliers)
    return bids, requests, capacity, scoring
