"""Rumor centrality on tree snapshots and the BFS-tree score on cyclic ones.

All scores are natural logs; ``N!`` alone overflows doubles well before the
400-node snapshots used in experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .diffusion import DiffusionSnapshot
from .errors import NotATreeError

# log-scores closer than this count as tied
TIE_TOL = 1e-9


@dataclass
class CentralityScores:
    log_score: dict[int, float]
    center: int

    def best_of(self, nodes: Iterable[int]) -> int:
        """Highest-scoring node among ``nodes``; ties go to the lowest id."""
        return argmax_lowest_id(self.log_score, nodes)


def argmax_lowest_id(score: dict[int, float], nodes: Iterable[int]) -> int:
    nodes = list(nodes)
    if not nodes:
        raise ValueError("argmax over an empty node set")
    best = max(score[v] for v in nodes)
    tol = TIE_TOL * max(1.0, abs(best))
    return min(v for v in nodes if score[v] >= best - tol)


def _require_tree(snapshot: DiffusionSnapshot) -> None:
    if not snapshot.is_tree:
        raise NotATreeError(
            f"snapshot has {snapshot.edge_count} edges on {snapshot.size} nodes; "
            "use bfs_heuristic_scores for cyclic snapshots"
        )


def _rooted_order(snapshot: DiffusionSnapshot, root: int) -> tuple[list[int], dict[int, int | None]]:
    order = [root]
    parent: dict[int, int | None] = {root: None}
    i = 0
    while i < len(order):
        u = order[i]
        for w in snapshot.adjacency[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
        i += 1
    return order, parent


def subtree_sizes(snapshot: DiffusionSnapshot, root: int) -> dict[int, int]:
    """``T_u`` for every node when the tree is rooted at ``root``."""
    _require_tree(snapshot)
    if root not in snapshot:
        raise KeyError(f"node {root} is not infected")
    order, parent = _rooted_order(snapshot, root)
    size = dict.fromkeys(order, 1)
    for u in reversed(order):
        p = parent[u]
        if p is not None:
            size[p] += size[u]
    return size


def rumor_centrality_tree(snapshot: DiffusionSnapshot) -> CentralityScores:
    """Exact ``log R(v)`` for all nodes in O(N).

    One pass computes subtree sizes from an arbitrary root; a second pass
    pushes scores outward using ``R(c) = R(u) * T_c / (N - T_c)`` for each
    child ``c`` of ``u``.
    """
    _require_tree(snapshot)
    n = snapshot.size
    root = snapshot.infected[0]
    order, parent = _rooted_order(snapshot, root)
    size = dict.fromkeys(order, 1)
    for u in reversed(order):
        p = parent[u]
        if p is not None:
            size[p] += size[u]

    log_score = {root: math.lgamma(n + 1) - sum(math.log(s) for s in size.values())}
    for u in order[1:]:
        t = size[u]
        log_score[u] = log_score[parent[u]] + math.log(t) - math.log(n - t)
    return CentralityScores(log_score, argmax_lowest_id(log_score, log_score))


class _LocalGraph:
    """Snapshot adjacency re-indexed to 0..N-1 in ascending node-id order."""

    def __init__(self, snapshot: DiffusionSnapshot) -> None:
        self.nodes = sorted(snapshot.infected)
        local = {v: i for i, v in enumerate(self.nodes)}
        indptr = [0]
        indices: list[int] = []
        for v in self.nodes:
            indices.extend(local[w] for w in snapshot.adjacency[v])  # already sorted
            indptr.append(len(indices))
        n = len(self.nodes)
        self.n = n
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        self.edge_src = np.repeat(np.arange(n, dtype=np.int32), np.diff(self.indptr))
        self.degree = np.asarray([snapshot.full_degree(v) for v in self.nodes], dtype=np.int64)
        self.csr = csr_matrix(
            (np.ones(len(indices), dtype=np.int8), self.indices, self.indptr), shape=(n, n)
        )


def _bfs_score(g: _LocalGraph, root: int, log_nfact: float) -> float:
    order, pred = breadth_first_order(g.csr, root, directed=True, return_predecessors=True)
    if order.size != g.n:
        raise ValueError("snapshot is disconnected")
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)

    # earlier-infected neighbors of each node, read in BFS order
    earlier = np.bincount(
        g.edge_src[pos[g.indices] < pos[g.edge_src]], minlength=g.n
    )[order]
    deg = g.degree[order]
    # edges leaving the prefix sigma_1..sigma_{k-1} in the underlying graph:
    # sum of degrees minus twice the edges inside the prefix
    boundary = np.cumsum(deg)[:-1] - 2 * np.cumsum(earlier)[:-1]
    log_p_order = float(np.sum(np.log(earlier[1:])) - np.sum(np.log(boundary)))

    pred_list = pred.tolist()
    size = [1] * g.n
    for u in reversed(order.tolist()[1:]):
        size[pred_list[u]] += size[u]
    log_r = log_nfact - float(np.sum(np.log(size)))
    return log_p_order + log_r


def bfs_heuristic_scores(snapshot: DiffusionSnapshot) -> CentralityScores:
    """Per-node ``log P(sigma_v | v) + log R(v, T_bfs(v))``.

    ``sigma_v`` is the BFS order from ``v`` with ties visited in ascending id
    order, ``T_bfs(v)`` the matching BFS tree. ``P(sigma_v | v)`` is the SI
    probability of that order: for each newly added node, the number of its
    edges into the already ordered prefix over the number of edges leaving
    the prefix in the underlying graph (``snapshot.full_degree``). Counting
    only edges among infected nodes instead would reward peripheral starting
    points, whose prefixes keep a small infected boundary.
    """
    g = _LocalGraph(snapshot)
    log_nfact = math.lgamma(g.n + 1)
    log_score = {v: _bfs_score(g, i, log_nfact) for i, v in enumerate(g.nodes)}
    return CentralityScores(log_score, argmax_lowest_id(log_score, log_score))


def likelihood_scores(snapshot: DiffusionSnapshot) -> CentralityScores:
    """Exact rumor centrality on trees, the BFS heuristic otherwise."""
    if snapshot.is_tree:
        return rumor_centrality_tree(snapshot)
    return bfs_heuristic_scores(snapshot)
