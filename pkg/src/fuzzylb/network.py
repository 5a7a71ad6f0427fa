"""Network graph, routing table, load vector and cost table.

The routing table holds all-pairs minimum hop counts (breadth-first search
per node). The cost table mirrors those hop costs and carries the number of
heavily loaded nodes, which the fuzzy controller consumes alongside each
node's own load.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class NetworkGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one node, got n={self.n}")
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ValueError(f"bad edge ({i}, {j}) for n={self.n}")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj


def _as_rng(rng: np.random.Generator | int) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _component_labels(n: int, edges: set[tuple[int, int]]) -> list[int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    labels = [-1] * n
    label = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        queue = deque([start])
        labels[start] = label
        while queue:
            node = queue.popleft()
            for nb in adj[node]:
                if labels[nb] < 0:
                    labels[nb] = label
                    queue.append(nb)
        label += 1
    return labels


def generate_random_graph(
    n: int, edge_prob: float, rng: np.random.Generator | int
) -> NetworkGraph:
    """Erdos-Renyi style graph with connectivity repair.

    Every unordered pair gets an edge independently with probability
    edge_prob. While the result is disconnected, one extra edge is added
    between a uniformly chosen node and a uniformly chosen node of another
    component. Deterministic for a given generator state.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not (0.0 <= edge_prob <= 1.0):
        raise ValueError(f"edge probability must lie in [0, 1], got {edge_prob}")
    gen = _as_rng(rng)
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        for j in range(i + 1, n):
            if gen.random() < edge_prob:
                edges.add((i, j))
    labels = _component_labels(n, edges)
    while len(set(labels)) > 1:
        a = int(gen.integers(n))
        others = [v for v in range(n) if labels[v] != labels[a]]
        b = others[int(gen.integers(len(others)))]
        edges.add((min(a, b), max(a, b)))
        labels = _component_labels(n, edges)
    return NetworkGraph(n, frozenset(edges))


def build_routing_table(graph: NetworkGraph) -> list[list[float]]:
    """All-pairs minimum hop counts via BFS; INF marks unreachable pairs."""
    adj = graph.adjacency()
    table = []
    for src in range(graph.n):
        dist = [INF] * graph.n
        dist[src] = 0.0
        queue = deque([src])
        while queue:
            node = queue.popleft()
            for nb in adj[node]:
                if math.isinf(dist[nb]):
                    dist[nb] = dist[node] + 1.0
                    queue.append(nb)
        table.append(dist)
    return table


def count_heavy_nodes(loads: Sequence[float], threshold: float) -> int:
    """Number of nodes whose load strictly exceeds the threshold."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    return sum(1 for load in loads if load > threshold)


@dataclass(frozen=True)
class CostTable:
    """Pairwise communication costs plus the current heavy-node count."""

    costs: tuple[tuple[float, ...], ...]
    heavy_count: int

    @property
    def n(self) -> int:
        return len(self.costs)


def build_cost_table(
    routing: Sequence[Sequence[float]], loads: Sequence[float], threshold: float
) -> CostTable:
    n = len(routing)
    if any(len(row) != n for row in routing):
        raise ValueError("routing table is not square")
    if len(loads) != n:
        raise ValueError(f"load vector has {len(loads)} entries for {n} nodes")
    costs = tuple(tuple(float(c) for c in row) for row in routing)
    return CostTable(costs=costs, heavy_count=count_heavy_nodes(loads, threshold))


def graph_to_text(graph: NetworkGraph) -> str:
    """Edge-list dump: an `n` header line, then one `i j` line per edge."""
    lines = [str(graph.n)]
    lines.extend(f"{i} {j}" for i, j in sorted(graph.edges))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> NetworkGraph:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty graph dump")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"bad node count line {lines[0]!r}") from exc
    edges = set()
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {line!r}")
        i, j = int(parts[0]), int(parts[1])
        if i == j:
            raise ValueError(f"self-loop in edge line {line!r}")
        edges.add((min(i, j), max(i, j)))
    return NetworkGraph(n, frozenset(edges))
