"""Balancing policies.

The fuzzy balancer is sender initiated and splits into the classic four
policies: the information policy is global (the controller sees every
node's true load), the transfer policy is the fuzzy controller itself, the
location policy picks the cheapest receiver from the cost table, and the
selection policy migrates the latest-arrived queued task. Round-robin and
random placement serve as static baselines without migration.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .fuzzy import FuzzyEngine, NodeStatus, cached_status
from .network import CostTable


class PolicyKind(Enum):
    FUZZY = "fuzzy"
    ROUND_ROBIN = "round_robin"
    RANDOMIZE = "randomize"


@dataclass(frozen=True)
class MigrationDecision:
    source: int
    target: int
    task: int

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"migration from node {self.source} to itself")


def fuzzy_transfer_policy(
    load: float, heavy_count: int, engine: FuzzyEngine
) -> NodeStatus:
    """Status of a node under the fuzzy controller. Total: inputs where no
    rule fires come out neutral."""
    return cached_status(engine, float(load), float(heavy_count))


def location_policy(
    sender: int,
    statuses: Sequence[NodeStatus],
    cost: CostTable,
    excluded: frozenset[int] | set[int] = frozenset(),
) -> int | None:
    """Cheapest reachable receiver for a sender, ties broken by lowest id.

    Returns None when no receiver is available, in which case the sender
    stays where it is and is effectively neutral for this round.
    """
    best: int | None = None
    best_cost = float("inf")
    for node, status in enumerate(statuses):
        if status is not NodeStatus.RECEIVER or node == sender or node in excluded:
            continue
        c = cost.costs[sender][node]
        if c < best_cost:
            best, best_cost = node, c
    return best


def selection_policy(queue: Sequence[int]) -> int | None:
    """Latest-arrived task that is not executing.

    The queue is in arrival order and its head, when present, is the task
    currently executing; only tasks behind the head are transferable.
    """
    if len(queue) < 2:
        return None
    return queue[-1]


def plan_migrations(
    statuses: Sequence[NodeStatus],
    cost: CostTable,
    queues: Sequence[Sequence[int]],
) -> list[MigrationDecision]:
    """One migration per sender, walking senders by ascending node id.

    A sender that cannot find a partner stays neutral for this round. If
    task selection fails for the chosen partner, the partner is excluded
    and the next-cheapest one is tried, until the receiver pool runs out.
    A receiver that accepts a task leaves the pool for this invocation.
    """
    decisions: list[MigrationDecision] = []
    taken: set[int] = set()
    for sender, status in enumerate(statuses):
        if status is not NodeStatus.SENDER:
            continue
        excluded = set(taken)
        while True:
            partner = location_policy(sender, statuses, cost, excluded)
            if partner is None:
                break
            task = selection_policy(queues[sender])
            if task is None:
                excluded.add(partner)
                continue
            decisions.append(MigrationDecision(source=sender, target=partner, task=task))
            taken.add(partner)
            break
    return decisions


def round_robin_assign(index: int, n: int) -> int:
    """Static placement: the index-th task goes to node index mod n."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    return index % n


def randomize_assign(rng: np.random.Generator, n: int) -> int:
    """Static placement: node floor(u * n) for u uniform in [0, 1)."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    return min(int(rng.random() * n), n - 1)
