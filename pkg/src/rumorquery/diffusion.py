"""SI spreading with unit-rate exponential edge delays.

With homogeneous rates the next infection is a uniformly random boundary
edge (memorylessness), so the simulator never draws clock values.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol, TextIO

from .errors import ParameterError, SimulationError


class Topology(Protocol):
    def neighbors(self, v: int) -> tuple[int, ...]: ...


@dataclass
class DiffusionSnapshot:
    """Ground truth of one spreading run.

    ``infected`` is in infection order, ``infected[0]`` being the source.
    ``adjacency`` is the subgraph induced on the infected nodes, neighbor
    lists sorted ascending. ``graph_degree`` holds each infected node's degree
    in the underlying topology; when omitted the snapshot is taken to be the
    whole graph.
    """

    infected: list[int]
    parent_of: dict[int, int | None]
    adjacency: dict[int, tuple[int, ...]]
    graph_degree: dict[int, int] | None = None
    order: dict[int, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.order = {v: i for i, v in enumerate(self.infected)}

    @property
    def source(self) -> int:
        return self.infected[0]

    @property
    def size(self) -> int:
        return len(self.infected)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency.values()) // 2

    @property
    def is_tree(self) -> bool:
        # the infected set is connected by construction
        return self.edge_count == self.size - 1

    def __contains__(self, v: object) -> bool:
        return v in self.order

    def full_degree(self, v: int) -> int:
        if self.graph_degree is None:
            return len(self.adjacency[v])
        return self.graph_degree[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise KeyError(f"node {v} is not infected") from None


def simulate_si(topology: Topology, source: int, n_infected: int, seed: int) -> DiffusionSnapshot:
    if n_infected < 1:
        raise ParameterError(f"n_infected must be >= 1, got {n_infected}")
    rng = random.Random(seed)
    infected = [source]
    parent_of: dict[int, int | None] = {source: None}
    # boundary edges (infected endpoint, susceptible endpoint); entries whose
    # target got infected through another edge are discarded lazily
    boundary = [(source, w) for w in topology.neighbors(source)]
    while len(infected) < n_infected:
        target = None
        while boundary:
            i = rng.randrange(len(boundary))
            edge = boundary[i]
            boundary[i] = boundary[-1]
            boundary.pop()
            if edge[1] not in parent_of:
                target = edge
                break
        if target is None:
            raise SimulationError(
                f"only {len(infected)} nodes reachable from source {source}, "
                f"{n_infected} requested"
            )
        u, w = target
        parent_of[w] = u
        infected.append(w)
        boundary.extend((w, x) for x in topology.neighbors(w) if x not in parent_of)

    adjacency = {}
    degree = {}
    for v in infected:
        nbrs = topology.neighbors(v)
        degree[v] = len(nbrs)
        adjacency[v] = tuple(sorted(x for x in nbrs if x in parent_of))
    return DiffusionSnapshot(infected, parent_of, adjacency, degree)


def hop_distances(snapshot: DiffusionSnapshot, u: int) -> dict[int, int]:
    """BFS distances from ``u`` inside the snapshot."""
    if u not in snapshot:
        raise KeyError(f"node {u} is not infected")
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in snapshot.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def hop_distance(snapshot: DiffusionSnapshot, u: int, v: int) -> int:
    if v not in snapshot:
        raise KeyError(f"node {v} is not infected")
    return hop_distances(snapshot, u)[v]


def write_snapshot(snapshot: DiffusionSnapshot, stream: TextIO) -> None:
    """Debug dump: one ``v parent order_index`` line per node, ``-`` for no parent."""
    for i, v in enumerate(snapshot.infected):
        parent = snapshot.parent_of[v]
        stream.write(f"{v} {'-' if parent is None else parent} {i}\n")
