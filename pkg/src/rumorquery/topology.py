"""Graph topologies used by the diffusion experiments.

Two flavours exist:

* :class:`FiniteGraph` -- an immutable undirected simple graph with dense
  integer node ids and sorted adjacency tuples.
* :class:`RegularTree` -- an implicit infinite d-regular tree whose nodes are
  materialized lazily as the diffusion reaches them.

Both expose ``neighbors(v)`` so the simulator can treat them uniformly.
"""

from __future__ import annotations

import gzip
import io
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import EdgeListParseError, ParameterError


@dataclass(frozen=True)
class FiniteGraph:
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "FiniteGraph":
        """Build a simple graph on nodes ``0..n-1``; self-loops and repeats are dropped."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def mean_degree(self) -> float:
        return 2.0 * self.edge_count / self.node_count if self.node_count else 0.0

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    def component_sizes(self) -> list[int]:
        """Size of the connected component containing each node."""
        n = self.node_count
        size = [0] * n
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            seen[start] = True
            comp = [start]
            i = 0
            while i < len(comp):
                for w in self.adjacency[comp[i]]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                i += 1
            for v in comp:
                size[v] = len(comp)
        return size


ROOT = 0


class RegularTree:
    """Infinite d-regular tree, materialized on demand.

    Node 0 is the root. Every other node has one parent and ``d - 1``
    children; the root has ``d`` children. Children get fresh ids the first
    time their parent is expanded, so an instance is mutable and must not be
    shared between concurrently running trials.
    """

    def __init__(self, d: int) -> None:
        if d < 3:
            raise ParameterError(f"regular tree degree must be >= 3, got {d}")
        self.d = d
        self._parent: list[int | None] = [None]
        self._children: list[tuple[int, ...] | None] = [None]

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def root(self) -> int:
        return ROOT

    def parent(self, v: int) -> int | None:
        self._check(v)
        return self._parent[v]

    def is_expanded(self, v: int) -> bool:
        self._check(v)
        return self._children[v] is not None

    def expand_neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        kids = self._children[v]
        if kids is None:
            n_kids = self.d if v == ROOT else self.d - 1
            first = len(self._parent)
            kids = tuple(range(first, first + n_kids))
            self._parent.extend([v] * n_kids)
            self._children.extend([None] * n_kids)
            self._children[v] = kids
        parent = self._parent[v]
        return kids if parent is None else (parent, *kids)

    neighbors = expand_neighbors

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self._parent):
            raise LookupError(f"node {v} has not been materialized")


def expand_neighbors(tree: RegularTree, v: int) -> tuple[int, ...]:
    """Return the ``d`` neighbors of ``v``, materializing its children on first use."""
    return tree.expand_neighbors(v)


def gen_erdos_renyi(n: int, avg_degree: float, seed: int) -> FiniteGraph:
    """G(n, p) with ``p = avg_degree / (n - 1)``."""
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if not 0 <= avg_degree <= n - 1:
        raise ParameterError(f"avg_degree must lie in [0, {n - 1}], got {avg_degree}")
    p = avg_degree / (n - 1)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return FiniteGraph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_preferential_attachment(n: int, edges_per_node: float, seed: int) -> FiniteGraph:
    """Barabási–Albert growth with a possibly fractional attachment count.

    Node ``t`` attaches ``floor(m*t) - floor(m*(t-1))`` edges, so ``m = 1.5``
    alternates 1 and 2 and the total edge count tracks ``m * (n - 1)``.
    Targets are drawn proportionally to degree, without repetition.
    """
    m = edges_per_node
    if n < 3:
        raise ParameterError(f"n must be >= 3, got {n}")
    if not 1 <= m <= n / 2:
        raise ParameterError(f"edges_per_node must lie in [1, {n / 2}], got {m}")
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = [(1, 0)]
    ends = [0, 1]  # each node appears once per incident edge
    for t in range(2, n):
        k = min(t, math.floor(m * t) - math.floor(m * (t - 1)))
        targets: set[int] = set()
        while len(targets) < k:
            targets.add(ends[rng.randrange(len(ends))])
        for w in sorted(targets):
            edges.append((t, w))
            ends.append(t)
            ends.append(w)
    return FiniteGraph.from_edges(n, edges)


def load_edge_list(stream: TextIO) -> FiniteGraph:
    """Parse a SNAP-style edge list.

    Ids are relabeled densely in order of first appearance. Duplicate and
    reversed edges collapse, self-loops are dropped.
    """
    index: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        tokens = text.split()
        if len(tokens) != 2:
            raise EdgeListParseError(f"line {lineno}: expected 2 tokens, got {len(tokens)}")
        pair = []
        for tok in tokens:
            try:
                raw = int(tok)
            except ValueError:
                raise EdgeListParseError(f"line {lineno}: non-integer token {tok!r}") from None
            pair.append(index.setdefault(raw, len(index)))
        edges.append((pair[0], pair[1]))
    if not edges:
        raise EdgeListParseError("no edges")
    return FiniteGraph.from_edges(len(index), edges)


def load_edge_list_file(path: str | Path) -> FiniteGraph:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="ascii") as fh:
            return load_edge_list(fh)
    with path.open("r", encoding="ascii") as fh:
        return load_edge_list(fh)


def load_edge_list_text(text: str) -> FiniteGraph:
    return load_edge_list(io.StringIO(text))
