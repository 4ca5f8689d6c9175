"""Bipartite matching kernels: maximum cardinality, perfect-matching
detection, maximum-weight assignment, and capacitated serve-set
feasibility.

Algorithms are chosen by contract (optimal cardinality/weight) and are
verified against exhaustive oracles in the test suite.  All functions are
pure and re-entrant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K


@dataclass(frozen=True)
class BipartiteGraph:
    """Boolean adjacency, rows = demand side, columns = servers."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.ndim != 2:
            raise ValueError("adjacency must be a 2-d boolean matrix")
        object.__setattr__(self, "adjacency", adj)

    @property
    def left_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def right_count(self) -> int:
        return self.adjacency.shape[1]


@dataclass(frozen=True)
class WeightedAssignmentProblem:
    """Nonnegative edge weights with an allowed-edge mask.

    Partial matchings are permitted: leaving a row unmatched contributes
    weight zero, so forbidden edges are simply never used.
    """

    weights: np.ndarray
    allowed: np.ndarray = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2:
            raise ValueError("weights must be a 2-d matrix")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        allowed = self.allowed
        allowed = np.ones_like(w, dtype=bool) if allowed is None else np.asarray(allowed, dtype=bool)
        if allowed.shape != w.shape:
            raise ValueError("allowed mask must match the weight matrix shape")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "allowed", allowed)


def _scratch(n: int, m: int):
    return (
        np.empty(m, np.int64),  # match_r
        np.empty(n, np.bool_),  # visited_q
        np.empty(m, np.bool_),  # visited_r
        np.empty(n, np.int64),  # entry_s
        np.empty(m, np.int64),  # parent_q
        np.empty(n, np.int64),  # bfs_q
    )


def max_cardinality_matching(g: BipartiteGraph) -> tuple[list[tuple[int, int]], int]:
    """Maximum-cardinality matching; returns (edges, size)."""
    conn = g.adjacency.astype(np.uint8)
    match_r, *rest = _scratch(g.left_count, g.right_count)
    size = int(K._max_cardinality(conn, match_r, *rest))
    edges = [(int(match_r[r]), r) for r in range(g.right_count) if match_r[r] >= 0]
    edges.sort()
    return edges, size


def has_perfect_matching(g: BipartiteGraph) -> bool:
    if g.left_count != g.right_count:
        raise ValueError("perfect matching is defined for square graphs only")
    _, size = max_cardinality_matching(g)
    return size == g.left_count


def max_weight_matching(p: WeightedAssignmentProblem) -> tuple[list[tuple[int, int]], float]:
    """Maximum-weight partial assignment; returns (pairs, total weight).

    Solved as a square min-cost assignment padded with zero-weight dummy
    rows/columns, so every row always has an unmatched alternative and
    forbidden edges are never forced.
    """
    rows, cols = p.weights.shape
    s = rows + cols
    w_max = float(p.weights.max(initial=0.0))
    penalty = (w_max + 1.0) * (s + 1)
    cost = np.full((s, s), w_max)
    real = p.weights.copy()
    real[~p.allowed] = -penalty
    cost[:rows, :cols] = w_max - real
    assign_row = np.full(s, -1, dtype=np.int64)
    K._assignment_min_cost(cost, assign_row)
    pairs = []
    total = 0.0
    for i in range(rows):
        j = int(assign_row[i])
        if j < cols and p.allowed[i, j]:
            pairs.append((i, j))
            total += float(p.weights[i, j])
    return pairs, total


def feasible_serve_set(demands, connectivity) -> bool:
    """Can every queue i obtain demands[i] distinct ON unit-capacity
    servers simultaneously?  False trivially when total demand exceeds the
    server count."""
    conn = np.asarray(connectivity, dtype=np.uint8)
    d = np.asarray(demands, dtype=np.int64)
    if d.shape[0] != conn.shape[0]:
        raise ValueError("demand vector length must match queue count")
    if np.any(d < 0):
        raise ValueError("demands must be nonnegative")
    match_r, *rest = _scratch(conn.shape[0], conn.shape[1])
    return bool(K._feasible_demands(conn, d, match_r, *rest))


def serve_assignment(demands, connectivity):
    """Server -> queue assignment realizing the demands, or None when
    infeasible.  Augmentation scans servers in index order, so the result
    is deterministic."""
    conn = np.asarray(connectivity, dtype=np.uint8)
    d = np.asarray(demands, dtype=np.int64)
    match_r, *rest = _scratch(conn.shape[0], conn.shape[1])
    if not K._feasible_demands(conn, d, match_r, *rest):
        return None
    return np.asarray(match_r, dtype=np.int64)


def max_served_with_caps(caps, connectivity) -> int:
    """Largest number of packets servable when queue i offers at most
    caps[i] packets (unit-capacity servers).  Greedy unit augmentation is
    exact here: once a queue cannot be granted another server its
    alternating-reachable region is saturated and stays so."""
    conn = np.asarray(connectivity, dtype=np.uint8)
    caps = np.asarray(caps, dtype=np.int64)
    n, m = conn.shape
    match_r, visited_q, visited_r, entry_s, parent_q, bfs_q = _scratch(n, m)
    match_r[:] = -1
    total = 0
    for i in range(n):
        for _ in range(int(caps[i])):
            if K._augment_one(conn, match_r, i, visited_q, visited_r, entry_s, parent_q, bfs_q):
                total += 1
            else:
                break
    return total
