"""Seeded discrete-event simulation of the distributed system.

A run draws a random connected network, per-node processor speeds, a task
stream (exponential inter-arrivals, uniform service demands) and then plays
arrivals, completions and rebalances through a single event queue. Nodes
execute their FIFO head only; under the fuzzy policy every arrival and
completion triggers a rebalance that may migrate queued tasks, each paying a
delay proportional to the hop count between the two nodes.

Randomness is split by purpose into independent substreams (graph, arrival,
demand, speed, placement) so that runs with different policies but the same
seed share the exact same workload: common random numbers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Sequence

import numpy as np

from .fuzzy import (
    DEFAULT_BREAKPOINTS,
    DEFAULT_RULES,
    Breakpoints,
    FuzzyEngine,
    FuzzyRule,
    HeavyCountPartition,
)
from .network import NetworkGraph, build_cost_table, build_routing_table, generate_random_graph
from .policies import (
    PolicyKind,
    fuzzy_transfer_policy,
    plan_migrations,
    randomize_assign,
    round_robin_assign,
)

RNG_KIND = "numpy:PCG64"
STREAM_NAMES = ("graph", "arrival", "demand", "speed", "placement")

# calibrated so the dynamic balancer has something to balance: bursty
# arrivals, near-unit task sizes, strongly heterogeneous processor speeds
# and migrations that are cheap relative to a service time
DEFAULT_ARRIVAL_RATE = 10.0
DEFAULT_SPEED_RANGE = (0.18, 1.82)
DEFAULT_DEMAND_RANGE = (0.8, 1.2)
DEFAULT_MIGRATION_DELAY = 0.01


class ConfigError(ValueError):
    """Invalid simulation configuration, raised before any event runs."""


@dataclass
class Task:
    id: int
    arrival_time: float
    service_demand: float
    completion_time: float | None = None

    def response_time(self) -> float:
        if self.completion_time is None:
            raise ValueError(f"task {self.id} has not completed")
        return self.completion_time - self.arrival_time


@dataclass(frozen=True)
class SimConfig:
    nodes: int = 5
    tasks: int = 10
    arrival_rate: float = DEFAULT_ARRIVAL_RATE
    edge_prob: float = 0.2
    policy: PolicyKind = PolicyKind.FUZZY
    breakpoints: Breakpoints = DEFAULT_BREAKPOINTS
    heavy_partition: HeavyCountPartition | None = None
    rules: tuple[FuzzyRule, ...] = DEFAULT_RULES
    speed_range: tuple[float, float] = DEFAULT_SPEED_RANGE
    demand_range: tuple[float, float] = DEFAULT_DEMAND_RANGE
    migration_delay_per_hop: float = DEFAULT_MIGRATION_DELAY
    neutral_band: float = 0.05
    rebalance_on_events: bool = True
    rebalance_interval: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.nodes < 1:
            raise ConfigError(f"nodes must be >= 1, got {self.nodes}")
        if self.tasks < 1:
            raise ConfigError(f"tasks must be >= 1, got {self.tasks}")
        if not (self.arrival_rate > 0 and math.isfinite(self.arrival_rate)):
            raise ConfigError(f"arrival rate must be positive, got {self.arrival_rate}")
        if not (0.0 <= self.edge_prob <= 1.0):
            raise ConfigError(f"edge probability must lie in [0, 1], got {self.edge_prob}")
        for name, (lo, hi) in (("speed", self.speed_range), ("demand", self.demand_range)):
            if not (0 < lo <= hi and math.isfinite(hi)):
                raise ConfigError(f"{name} range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if not (self.migration_delay_per_hop > 0):
            raise ConfigError(
                f"migration delay per hop must be positive, got {self.migration_delay_per_hop}"
            )
        if not (0.0 <= self.neutral_band < 0.5):
            raise ConfigError(f"neutral band must lie in [0, 0.5), got {self.neutral_band}")
        if self.rebalance_interval is not None and not (self.rebalance_interval > 0):
            raise ConfigError(
                f"rebalance interval must be positive, got {self.rebalance_interval}"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if not self.rules:
            raise ConfigError("rule base must not be empty")

    def effective_heavy_partition(self) -> HeavyCountPartition:
        if self.heavy_partition is not None:
            return self.heavy_partition
        return HeavyCountPartition.default_for(self.nodes)

    def engine(self) -> FuzzyEngine:
        return FuzzyEngine(
            breakpoints=self.breakpoints,
            heavy_partition=self.effective_heavy_partition(),
            rules=self.rules,
            neutral_band=self.neutral_band,
        )

    def to_dict(self) -> dict:
        """Flat, JSON-friendly view used for run metadata."""
        return {
            "nodes": self.nodes,
            "tasks": self.tasks,
            "arrival_rate": self.arrival_rate,
            "edge_prob": self.edge_prob,
            "policy": self.policy.value,
            "breakpoints": self.breakpoints.to_string(),
            "heavy_partition": self.effective_heavy_partition().to_string(),
            "rules": [f"{r.load_term} & {r.count_term} -> {r.consequent.value}" for r in self.rules],
            "speed_range": list(self.speed_range),
            "demand_range": list(self.demand_range),
            "migration_delay_per_hop": self.migration_delay_per_hop,
            "neutral_band": self.neutral_band,
            "rebalance_on_events": self.rebalance_on_events,
            "rebalance_interval": self.rebalance_interval,
            "seed": self.seed,
        }


@dataclass
class RunMetrics:
    response_times: list[float]
    mean_response: float
    migrations: int
    completed_per_node: list[int]
    metadata: dict = field(default_factory=dict)


@dataclass
class Workload:
    """Everything random about a run, drawn up front for replayability."""

    graph: NetworkGraph
    speeds: tuple[float, ...]
    tasks: list[Task]
    placements: list[int]


def split_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent substreams per purpose, spawned from one seed."""
    root = np.random.SeedSequence(seed)
    children = root.spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(child) for name, child in zip(STREAM_NAMES, children)}


def draw_workload(cfg: SimConfig) -> Workload:
    """Draw graph, speeds, task stream and initial placements for a config.

    The draws consumed from the shared streams depend only on (seed, nodes,
    tasks, rates, ranges), never on the policy, so policies compared at the
    same seed see an identical workload.
    """
    cfg.validate()
    streams = split_streams(cfg.seed)
    graph = generate_random_graph(cfg.nodes, cfg.edge_prob, streams["graph"])
    speeds = tuple(float(s) for s in streams["speed"].uniform(*cfg.speed_range, size=cfg.nodes))
    gaps = streams["arrival"].exponential(1.0 / cfg.arrival_rate, size=cfg.tasks)
    arrivals = np.cumsum(gaps)
    demands = streams["demand"].uniform(*cfg.demand_range, size=cfg.tasks)
    tasks = [Task(i, float(arrivals[i]), float(demands[i])) for i in range(cfg.tasks)]
    if cfg.policy is PolicyKind.ROUND_ROBIN:
        placements = [round_robin_assign(i, cfg.nodes) for i in range(cfg.tasks)]
    else:
        placements = [randomize_assign(streams["placement"], cfg.nodes) for _ in range(cfg.tasks)]
    return Workload(graph=graph, speeds=speeds, tasks=tasks, placements=placements)


_COMPLETION, _ARRIVAL, _REBALANCE = 0, 1, 2


def simulate_workload(cfg: SimConfig, workload: Workload) -> RunMetrics:
    """Play one workload to completion and measure response times.

    Events at equal times are ordered completion < arrival < rebalance, then
    by node or task id, which makes the run fully deterministic.
    """
    cfg.validate()
    n = cfg.nodes
    if workload.graph.n != n:
        raise ConfigError(
            f"workload graph has {workload.graph.n} nodes, config says {n}"
        )
    if len(workload.tasks) != cfg.tasks or len(workload.placements) != cfg.tasks:
        raise ConfigError(
            f"workload has {len(workload.tasks)} tasks and "
            f"{len(workload.placements)} placements, config says {cfg.tasks}"
        )
    if len(workload.speeds) != n:
        raise ConfigError(f"workload has {len(workload.speeds)} speeds for {n} nodes")
    routing = build_routing_table(workload.graph)
    engine = cfg.engine()
    tasks = workload.tasks
    total = len(tasks)

    queues: list[list[int]] = [[] for _ in range(n)]
    busy = [False] * n
    completed_per_node = [0] * n
    completed = 0
    migrations = 0
    heap: list[tuple[float, int, int, int]] = []

    for task in tasks:
        heapq.heappush(heap, (task.arrival_time, _ARRIVAL, task.id, workload.placements[task.id]))

    fuzzy = cfg.policy is PolicyKind.FUZZY
    if fuzzy and cfg.rebalance_interval is not None:
        heapq.heappush(heap, (cfg.rebalance_interval, _REBALANCE, 0, -1))

    def start_head(node: int, now: float) -> None:
        tid = queues[node][0]
        duration = tasks[tid].service_demand / workload.speeds[node]
        busy[node] = True
        heapq.heappush(heap, (now + duration, _COMPLETION, node, tid))

    def rebalance(now: float) -> None:
        nonlocal migrations
        loads = [len(q) for q in queues]
        table = build_cost_table(routing, loads, cfg.breakpoints.s)
        statuses = [fuzzy_transfer_policy(load, table.heavy_count, engine) for load in loads]
        for decision in plan_migrations(statuses, table, queues):
            # the executing head is never transferable
            assert queues[decision.source][0] != decision.task
            queues[decision.source].remove(decision.task)
            hops = routing[decision.source][decision.target]
            landing = now + hops * cfg.migration_delay_per_hop
            heapq.heappush(heap, (landing, _ARRIVAL, decision.task, decision.target))
            migrations += 1

    last_time = 0.0
    while heap and completed < total:
        now, kind, key, extra = heapq.heappop(heap)
        assert now >= last_time  # causality
        last_time = now
        if kind == _COMPLETION:
            node, tid = key, extra
            assert queues[node] and queues[node][0] == tid
            queues[node].pop(0)
            tasks[tid].completion_time = now
            completed_per_node[node] += 1
            completed += 1
            if queues[node]:
                start_head(node, now)
            else:
                busy[node] = False
            if fuzzy and cfg.rebalance_on_events and completed < total:
                rebalance(now)
        elif kind == _ARRIVAL:
            tid, node = key, extra
            queues[node].append(tid)
            if len(queues[node]) == 1:
                start_head(node, now)
            if fuzzy and cfg.rebalance_on_events:
                rebalance(now)
        else:
            if fuzzy:
                rebalance(now)
            if cfg.rebalance_interval is not None and completed < total:
                heapq.heappush(heap, (now + cfg.rebalance_interval, _REBALANCE, key + 1, -1))
        # work conservation: a node is executing exactly when its queue is nonempty
        assert all(busy[i] == bool(queues[i]) for i in range(n))

    assert completed == total, "simulation drained with unfinished tasks"
    response_times = [task.response_time() for task in tasks]
    return RunMetrics(
        response_times=response_times,
        mean_response=fmean(response_times),
        migrations=migrations,
        completed_per_node=completed_per_node,
        metadata={
            "seed": cfg.seed,
            "rng": RNG_KIND,
            "streams": list(STREAM_NAMES),
            "config": cfg.to_dict(),
        },
    )


def run_simulation(cfg: SimConfig) -> RunMetrics:
    """Draw a workload for the config's seed and play it to completion."""
    return simulate_workload(cfg, draw_workload(cfg))


def run_experiment(
    cfg: SimConfig,
    task_counts: Sequence[int],
    seeds: Sequence[int],
    policies: Sequence[PolicyKind],
) -> dict[str, list[float]]:
    """Mean response time per (policy, task count), averaged over seeds.

    Policies are compared under common random numbers: for a given seed the
    graph, arrival, demand and speed draws are shared by all policies.
    """
    if not task_counts or not seeds or not policies:
        raise ConfigError("task counts, seeds and policies must all be non-empty")
    means: dict[str, list[float]] = {}
    for policy in policies:
        row = []
        for count in task_counts:
            runs = [
                run_simulation(replace(cfg, policy=policy, tasks=count, seed=seed))
                for seed in seeds
            ]
            row.append(fmean(run.mean_response for run in runs))
        means[policy.value] = row
    return means
