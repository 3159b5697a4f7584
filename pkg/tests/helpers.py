"""Snapshot builders and brute-force oracles shared by the test modules."""

from __future__ import annotations

import math
import random
from collections import deque

from rumorquery.diffusion import DiffusionSnapshot


def snapshot_from_edges(edges, source, nodes=None, degree=None) -> DiffusionSnapshot:
    """Snapshot over an explicit graph, infected in BFS order from ``source``.

    ``degree`` (an int) embeds the snapshot in a graph where every node has
    that many neighbors; by default the snapshot is the whole graph.
    """
    adj: dict[int, set[int]] = {v: set() for v in (nodes or ())}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    adj.setdefault(source, set())
    parent = {source: None}
    order = [source]
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w not in parent:
                parent[w] = u
                order.append(w)
                queue.append(w)
    assert len(order) == len(adj), "graph must be connected"
    graph_degree = None if degree is None else dict.fromkeys(order, degree)
    return DiffusionSnapshot(order, parent, {v: tuple(sorted(adj[v])) for v in order}, graph_degree)


def random_tree_edges(n: int, rng: random.Random, labels=None) -> list[tuple[int, int]]:
    """Uniform random labeled tree via a Prüfer sequence."""
    labels = labels or list(range(n))
    if n == 1:
        return []
    if n == 2:
        return [(labels[0], labels[1])]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((labels[leaf], labels[x]))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((labels[u], labels[v]))
    return edges


def count_infection_orderings(adj: dict[int, tuple[int, ...]], root: int) -> int:
    """Orderings of all nodes starting at ``root`` where each node touches an earlier one.

    Dynamic programming over subsets; independent of any subtree-size formula.
    """
    nodes = sorted(adj)
    idx = {v: i for i, v in enumerate(nodes)}
    nbr_mask = [sum(1 << idx[w] for w in adj[v]) for v in nodes]
    full = (1 << len(nodes)) - 1
    ways = {1 << idx[root]: 1}
    for _ in range(len(nodes) - 1):
        nxt: dict[int, int] = {}
        for mask, count in ways.items():
            for i in range(len(nodes)):
                if not mask >> i & 1 and nbr_mask[i] & mask:
                    m2 = mask | 1 << i
                    nxt[m2] = nxt.get(m2, 0) + count
        ways = nxt
    return ways.get(full, 0)


def naive_bfs_heuristic(snapshot: DiffusionSnapshot) -> dict[int, float]:
    """Straight transcription of the BFS-tree score with plain loops and sets."""
    adj = snapshot.adjacency
    n = snapshot.size
    out = {}
    for v in snapshot.infected:
        order = [v]
        parent = {v: None}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in sorted(adj[u]):
                if w not in parent:
                    parent[w] = u
                    order.append(w)
                    queue.append(w)
        log_p = 0.0
        prefix = {v}
        for k in range(1, n):
            x = order[k]
            into = sum(1 for w in adj[x] if w in prefix)
            leaving = sum(
                snapshot.full_degree(u) - sum(1 for w in adj[u] if w in prefix) for u in prefix
            )
            log_p += math.log(into) - math.log(leaving)
            prefix.add(x)
        sizes = {u: 1 for u in order}
        for u in reversed(order[1:]):
            sizes[parent[u]] += sizes[u]
        log_r = math.lgamma(n + 1) - sum(math.log(s) for s in sizes.values())
        out[v] = log_p + log_r
    return out


def two_sigma(se_a: float, se_b: float) -> float:
    return 2.0 * math.hypot(se_a, se_b)
