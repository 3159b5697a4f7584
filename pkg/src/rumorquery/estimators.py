"""Majority-voting source estimators: MVNA (batch) and MVAD (adaptive walk).

Both start from the rumor center and finish by picking the most likely
snapshot source among a filtered node set, using exact rumor centrality on
tree snapshots and the BFS-tree score otherwise.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .bounds import (  # noqa: F401  re-exported: the r* selectors drive both estimators
    r_star_ad_necessary,
    r_star_ad_sufficient,
    r_star_na_necessary,
    r_star_na_sufficient,
)
from .centrality import CentralityScores, likelihood_scores
from .diffusion import DiffusionSnapshot, hop_distances
from .errors import ParameterError
from .querying import TruthfulnessParams, ask, majority_designation, majority_identity


@dataclass(frozen=True)
class EstimatorConfig:
    K: int
    r: int
    params: TruthfulnessParams
    seed: int = 0

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ParameterError(f"r must be >= 1, got {self.r}")
        if self.K < self.r:
            raise ParameterError(f"budget K={self.K} cannot cover one respondent at r={self.r}")


@dataclass
class EstimateResult:
    estimate: int
    S_I: frozenset[int]
    S_D: frozenset[int]
    respondents: list[int]
    budget_spent: int


@dataclass
class PredecessorGraph:
    """Directed edges ``w -> v`` meaning ``w`` was voted ``v``'s infector."""

    predecessor: dict[int, int] = field(default_factory=dict)

    def add(self, w: int, v: int) -> None:
        self.predecessor[v] = w

    def successors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, w in self.predecessor.items():
            out.setdefault(w, []).append(v)
        return out

    def descendant_count(self, v: int, successors: dict[int, list[int]] | None = None) -> int:
        """Distinct nodes reachable from ``v``, not counting ``v`` even on a cycle."""
        succ = self.successors() if successors is None else successors
        seen = {v}
        stack = [v]
        while stack:
            for y in succ.get(stack.pop(), ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) - 1

    def descendant_counts(self, nodes) -> dict[int, int]:
        succ = self.successors()
        return {v: self.descendant_count(v, succ) for v in nodes}


def select_candidate_set(snapshot: DiffusionSnapshot, scores: CentralityScores, size: int) -> list[int]:
    """Rumor center first, then nodes by (hop distance from it, node id)."""
    if not 1 <= size <= snapshot.size:
        raise ParameterError(f"candidate set size must lie in [1, {snapshot.size}], got {size}")
    dist = hop_distances(snapshot, scores.center)
    return sorted(dist, key=lambda v: (dist[v], v))[:size]


def _argmax_set(values: dict[int, int]) -> frozenset[int]:
    if not values:
        return frozenset()
    top = max(values.values())
    return frozenset(v for v, c in values.items() if c == top)


def mvna(
    snapshot: DiffusionSnapshot,
    config: EstimatorConfig,
    scores: CentralityScores | None = None,
) -> EstimateResult:
    """Non-adaptive majority voting over ``floor(K/r)`` nodes nearest the rumor center.

    ``scores`` may carry precomputed likelihood scores for the snapshot. The
    candidate set is capped at the snapshot size, so a budget above ``r*N``
    is not fully spent.
    """
    if scores is None:
        scores = likelihood_scores(snapshot)
    rng = random.Random(config.seed)
    r = config.r
    candidates = select_candidate_set(snapshot, scores, min(config.K // r, snapshot.size))

    s_i: set[int] = set()
    pre = PredecessorGraph()
    for v in candidates:
        t = ask(snapshot, config.params, v, r, rng)
        if majority_identity(t):
            s_i.add(v)
        w = majority_designation(t, rng)
        if w is not None:
            pre.add(w, v)
    s_d = _argmax_set(pre.descendant_counts(candidates))

    final = s_i & s_d
    if not final:
        final = s_i if config.params.p == 1.0 else s_i | s_d
    estimate = scores.best_of(final) if final else scores.center
    return EstimateResult(estimate, frozenset(s_i), s_d, candidates, r * len(candidates))


def mvad(
    snapshot: DiffusionSnapshot,
    config: EstimatorConfig,
    scores: CentralityScores | None = None,
) -> EstimateResult:
    """Adaptive walk from the rumor center following majority-designated infectors.

    With ``p = 1`` a respondent's id answers are decisive, so the walk stops
    at the first respondent that claims to be the source. Otherwise the walk
    spends the whole budget, counting visits per node; the estimate is the
    likeliest node among those both voted source and most visited. If that
    leaves nothing, the last respondent queried is returned.
    """
    if scores is None:
        scores = likelihood_scores(snapshot)
    rng = random.Random(config.seed)
    r = config.r
    perfect_id = config.params.p == 1.0

    s = scores.center
    remaining = config.K
    visits: Counter[int] = Counter()
    s_i: set[int] = set()
    respondents: list[int] = []
    while remaining >= r:
        respondents.append(s)
        remaining -= r
        t = ask(snapshot, config.params, s, r, rng)
        if perfect_id:
            if t.yes_count:
                return EstimateResult(s, frozenset({s}), frozenset(), respondents, config.K - remaining)
        else:
            visits[s] += 1
            if majority_identity(t):
                s_i.add(s)
        nxt = majority_designation(t, rng)
        if nxt is None:
            nbrs = snapshot.adjacency[s]
            nxt = nbrs[rng.randrange(len(nbrs))] if nbrs else s
        s = nxt

    s_d = _argmax_set(dict(visits))
    final = (s_i & s_d) or (s_i | s_d)
    estimate = scores.best_of(final) if final else respondents[-1]
    return EstimateResult(estimate, frozenset(s_i), s_d, respondents, config.K - remaining)
