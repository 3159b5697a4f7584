"""The id/dir question oracle and majority-vote aggregation of its answers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .diffusion import DiffusionSnapshot
from .errors import ParameterError


@dataclass(frozen=True)
class TruthfulnessParams:
    """Probabilities of a truthful id answer (``p``) and dir answer (``q``)."""

    p: float
    q: float

    def __post_init__(self) -> None:
        for name, value in (("p", self.p), ("q", self.q)):
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")


@dataclass
class QueryTranscript:
    respondent: int
    rounds: int
    yes_count: int = 0
    designations: dict[int, int] = field(default_factory=dict)


def ask(
    snapshot: DiffusionSnapshot,
    params: TruthfulnessParams,
    respondent: int,
    r: int,
    rng: random.Random,
) -> QueryTranscript:
    """Ask ``respondent`` the id/dir pair ``r`` times.

    A dir answer follows only a "no" to the id question. A non-source names
    its true infector with probability ``q`` and otherwise a uniformly random
    other infected neighbor (its infector again if it has no other one). A
    source that denies being the source names a uniformly random infected
    neighbor; a lone source with no neighbors gives no dir answer at all.
    """
    if respondent not in snapshot:
        raise KeyError(f"node {respondent} is not infected")
    if r < 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    t = QueryTranscript(respondent, r)
    nbrs = snapshot.adjacency[respondent]
    parent = snapshot.parent_of[respondent]
    is_source = parent is None
    others = [w for w in nbrs if w != parent]
    p, q = params.p, params.q
    for _ in range(r):
        truthful_id = rng.random() < p
        if truthful_id == is_source:
            t.yes_count += 1
            continue
        if is_source:
            if not nbrs:
                continue
            w = nbrs[rng.randrange(len(nbrs))]
        elif rng.random() < q or not others:
            w = parent
        else:
            w = others[rng.randrange(len(others))]
        t.designations[w] = t.designations.get(w, 0) + 1
    return t


def majority_identity(t: QueryTranscript) -> bool:
    return 2 * t.yes_count >= t.rounds


def majority_designation(t: QueryTranscript, rng: random.Random) -> int | None:
    """Most-designated neighbor, uniform random tie-break; None without dir answers."""
    if not t.designations:
        return None
    top = max(t.designations.values())
    tied = sorted(w for w, c in t.designations.items() if c == top)
    if len(tied) == 1:
        return tied[0]
    return tied[rng.randrange(len(tied))]
