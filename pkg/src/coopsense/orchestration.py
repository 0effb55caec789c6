"""Assignment of sensing nodes to channels for the next session.

Channels bid their estimated un-occupancy. The centralized scheme divides the
``C`` nodes in proportion to the bids (Kelly's proportional allocation),
the decentralized scheme lets every node sample a channel with probability
proportional to its bid, and Round-Robin cycles blindly through the channels.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AllocationError, ConfigError


class Scheme(str, Enum):
    CENTRALIZED = "centralized"
    DECENTRALIZED = "decentralized"
    ROUND_ROBIN = "round-robin"
    HYBRID = "hybrid-failover"


@dataclass(frozen=True)
class AllocationPlan:
    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        if int(self.counts.sum()) != self.total:
            raise AllocationError(f"plan allocates {self.counts.sum()} of {self.total} nodes")


def _check_bids(bids) -> np.ndarray:
    w = np.asarray(bids, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise ValueError("bids must be a non-empty vector")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("bids must be finite and non-negative")
    return w


def kelly_shares(bids, capacity: float) -> np.ndarray:
    """Fractional proportional allocation ``w_m / sum(w) * C``; zero bids get zero."""
    w = _check_bids(bids)
    total = w.sum()
    if total <= 0:
        raise AllocationError("no estimable channels: all bids are zero")
    return np.where(w > 0, w / total * capacity, 0.0)


def kelly_allocate(bids, capacity: int) -> AllocationPlan:
    """Integer proportional allocation by the largest-remainder method.

    Every share is floored, then the leftover nodes go to the largest
    remainders, ties to the lowest channel index.
    """
    if capacity < 1:
        raise ConfigError("no sensing nodes")
    return AllocationPlan(_largest_remainder(kelly_shares(bids, capacity), capacity), capacity)


def _largest_remainder(shares: np.ndarray, capacity: int) -> np.ndarray:
    counts = np.floor(shares).astype(np.int64)
    leftover = capacity - int(counts.sum())
    if leftover:
        # stable sort on -remainder keeps lower indices first among ties
        order = np.argsort(counts - shares, kind="stable")
        counts[order[:leftover]] += 1
    return counts


def plan_to_assignment(plan: AllocationPlan) -> np.ndarray:
    """Node i's channel: nodes fill channels in index order."""
    return np.repeat(np.arange(len(plan.counts)), plan.counts)


def random_assignment(num_nodes: int, num_channels: int, rng: np.random.Generator) -> np.ndarray:
    """Every node picks a channel uniformly at random (the bootstrap session)."""
    return rng.integers(0, num_channels, size=num_nodes)


def centralized_orchestrate(bids, capacity: int, check: bool = True) -> np.ndarray:
    """Cluster-head assignment for the next session from current bids."""
    if check:
        return plan_to_assignment(kelly_allocate(bids, capacity))
    total = bids.sum()
    if total <= 0:
        raise AllocationError("no estimable channels: all bids are zero")
    counts = _largest_remainder(bids / total * capacity, capacity)
    return np.repeat(np.arange(len(counts)), counts)


def _cdf(w: np.ndarray) -> np.ndarray | None:
    cdf = np.cumsum(w)
    if cdf[-1] <= 0:
        return None
    # dividing by the last partial sum pins it (and any zero-bid tail) to exactly 1
    return cdf / cdf[-1]


def select_from_uniform(bids, r: float) -> int:
    """Smallest channel index whose normalised cumulative bid exceeds ``r``."""
    cdf = _cdf(_check_bids(bids))
    if cdf is None:
        raise AllocationError("no estimable channels: all bids are zero")
    return int(np.searchsorted(cdf, r, side="right"))


def decentralized_select(bids, rng: np.random.Generator) -> int:
    """One node's own channel choice given its view of the bids."""
    cdf = _cdf(_check_bids(bids))
    if cdf is None:
        return int(rng.integers(0, len(bids)))
    return int(np.searchsorted(cdf, rng.random(), side="right"))


def decentralized_assign(
    bids, num_nodes: int, rng: np.random.Generator, check: bool = True
) -> np.ndarray:
    """Independent choices of ``num_nodes`` nodes sharing the same bid view."""
    cdf = _cdf(_check_bids(bids) if check else bids)
    if cdf is None:
        return random_assignment(num_nodes, len(bids), rng)
    return np.searchsorted(cdf, rng.random(num_nodes), side="right")


def round_robin_assign(session_index: int, node_index: int, num_channels: int) -> int:
    if num_channels < 1:
        raise ConfigError("need at least one channel")
    return (node_index + session_index) % num_channels


def round_robin_assignment(session_index: int, num_nodes: int, num_channels: int) -> np.ndarray:
    return (np.arange(num_nodes) + session_index) % num_channels
