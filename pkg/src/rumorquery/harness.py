"""Monte Carlo experiments: detection probability over a (K, p, q) grid."""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .bounds import r_star_ad_sufficient, r_star_na_sufficient
from .centrality import likelihood_scores
from .diffusion import simulate_si
from .errors import ConfigurationError, EdgeListParseError, ParameterError
from .estimators import EstimatorConfig, mvad, mvna
from .querying import TruthfulnessParams
from .topology import (
    FiniteGraph,
    RegularTree,
    gen_erdos_renyi,
    gen_preferential_attachment,
    load_edge_list_file,
)

SCHEMES = ("na", "ad", "rc")
CSV_HEADER = (
    "topology", "d_or_n", "scheme", "K", "r", "p", "q", "N", "trials",
    "detect_prob", "stderr", "mean_budget",
)


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    d: int = 3
    n: int = 0
    avg_degree: float = 0.0
    ratio: float = 0.0
    path: str = ""

    @classmethod
    def parse(cls, text: str) -> "TopologySpec":
        """Parse ``tree:d=3``, ``er:n=2000,deg=4``, ``sf:n=2000,ratio=1.5`` or ``file:PATH``."""
        kind, _, rest = text.partition(":")
        if kind == "file":
            if not rest:
                raise ConfigurationError("file topology needs a path")
            return cls("file", path=rest)
        try:
            opts = dict(item.split("=", 1) for item in rest.split(",") if item)
            if kind == "tree":
                return cls("tree", d=int(opts.get("d", 3)))
            if kind == "er":
                return cls("er", n=int(opts["n"]), avg_degree=float(opts["deg"]))
            if kind == "sf":
                return cls("sf", n=int(opts["n"]), ratio=float(opts["ratio"]))
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"bad topology spec {text!r}: {exc}") from None
        raise ConfigurationError(f"unknown topology kind {kind!r} in {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologySpec
    n_infected: int
    trials: int
    scheme: str
    K_grid: tuple[int, ...]
    p_grid: tuple[float, ...]
    q_grid: tuple[float, ...]
    r: int | str = "auto"
    base_seed: int = 0

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.n_infected < 1:
            raise ConfigurationError("n_infected must be >= 1")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (self.K_grid and self.p_grid and self.q_grid):
            raise ConfigurationError("K, p and q grids must be nonempty")
        if any(k < 1 for k in self.K_grid):
            raise ConfigurationError("budgets must be >= 1")
        if any(not 0 <= x <= 1 for x in (*self.p_grid, *self.q_grid)):
            raise ConfigurationError("p and q must lie in [0, 1]")
        if self.r != "auto" and not (isinstance(self.r, int) and self.r >= 1):
            raise ConfigurationError(f"r must be 'auto' or a positive integer, got {self.r!r}")


@dataclass(frozen=True)
class ResultRow:
    topology: str
    d_or_n: int
    scheme: str
    K: int
    r: int
    p: float
    q: float
    N: int
    trials: int
    detection_probability: float
    stderr: float
    mean_budget_spent: float


@dataclass(frozen=True)
class _Point:
    K: int
    r: int
    p: float
    q: float


class _World:
    """Everything a trial needs besides its own seed; built once per process."""

    def __init__(self, config: ExperimentConfig, graph: FiniteGraph | None) -> None:
        self.config = config
        self.graph = graph
        self.sources: list[int] = []
        if graph is not None:
            sizes = graph.component_sizes()
            self.sources = [v for v in range(graph.node_count) if sizes[v] >= config.n_infected]

    @property
    def degree(self) -> int:
        """Degree plugged into the r* formulas."""
        if self.graph is None:
            return self.config.topology.d
        return max(3, round(self.graph.mean_degree()))

    @property
    def label(self) -> tuple[str, int]:
        spec = self.config.topology
        if spec.kind == "tree":
            return "tree", spec.d
        return spec.kind, self.graph.node_count

    def run_trial(self, point: _Point, t: int) -> tuple[bool, int]:
        cfg = self.config
        rng = random.Random(trial_seed(cfg.base_seed, self.grid_key(point), t))
        if self.graph is None:
            topo = RegularTree(cfg.topology.d)
            source = topo.root
        else:
            topo = self.graph
            source = self.sources[rng.randrange(len(self.sources))]
        snapshot = simulate_si(topo, source, cfg.n_infected, rng.getrandbits(63))
        scores = likelihood_scores(snapshot)
        if cfg.scheme == "rc":
            return scores.center == source, 0
        est_cfg = EstimatorConfig(
            point.K, point.r, TruthfulnessParams(point.p, point.q), rng.getrandbits(63)
        )
        run = mvna if cfg.scheme == "na" else mvad
        result = run(snapshot, est_cfg, scores)
        return result.estimate == source, result.budget_spent

    def grid_key(self, point: _Point) -> str:
        kind, size = self.label
        cfg = self.config
        return f"{kind}|{size}|{cfg.scheme}|{point.K}|{point.r}|{point.p!r}|{point.q!r}|{cfg.n_infected}"


def trial_seed(base_seed: int, grid_key: str, t: int) -> int:
    digest = hashlib.blake2b(f"{grid_key}|{t}".encode(), digest_size=8).digest()
    return base_seed ^ int.from_bytes(digest, "big")


def build_graph(spec: TopologySpec, seed: int) -> FiniteGraph | None:
    try:
        if spec.kind == "tree":
            RegularTree(spec.d)
            return None
        if spec.kind == "er":
            return gen_erdos_renyi(spec.n, spec.avg_degree, seed)
        if spec.kind == "sf":
            return gen_preferential_attachment(spec.n, spec.ratio, seed)
        if spec.kind == "file":
            return load_edge_list_file(spec.path)
    except (OSError, EdgeListParseError, ParameterError) as exc:
        raise ConfigurationError(f"cannot build topology {spec}: {exc}") from exc
    raise ConfigurationError(f"unknown topology kind {spec.kind!r}")


def resolve_r(config: ExperimentConfig, degree: int, K: int, p: float, q: float) -> int:
    if config.scheme == "rc":
        return 0
    if config.r != "auto":
        r = int(config.r)
    elif config.scheme == "na":
        r = r_star_na_sufficient(p, q, degree, max(K, 2))
    else:
        r = r_star_ad_sufficient(p, q, degree, max(K, 3))
    return min(r, K)


_WORKER: _World | None = None


def _init_worker(config: ExperimentConfig, graph: FiniteGraph | None) -> None:
    global _WORKER
    _WORKER = _World(config, graph)


def _run_chunk(index: int, point: _Point, trials: Sequence[int]) -> tuple[int, int, int]:
    wins = spent = 0
    for t in trials:
        ok, budget = _WORKER.run_trial(point, t)
        wins += ok
        spent += budget
    return index, wins, spent


def _prepare(config: ExperimentConfig) -> tuple[_World, list[_Point]]:
    config.validate()
    graph = build_graph(config.topology, config.base_seed)
    world = _World(config, graph)
    if graph is not None:
        if config.n_infected > graph.node_count:
            raise ConfigurationError(
                f"n_infected={config.n_infected} exceeds the graph's {graph.node_count} nodes"
            )
        if not world.sources:
            raise ConfigurationError(f"no connected component holds {config.n_infected} nodes")
    points = [
        _Point(K, resolve_r(config, world.degree, K, p, q), p, q)
        for K, p, q in itertools.product(config.K_grid, config.p_grid, config.q_grid)
    ]
    return world, points


def run_experiment(config: ExperimentConfig, workers: int = 1, chunk: int = 25) -> list[ResultRow]:
    """One :class:`ResultRow` per (K, p, q) grid point, in grid order.

    Every trial derives its own seed from ``base_seed``, the grid point and
    the trial index, so results do not depend on ``workers``.
    """
    world, points = _prepare(config)
    chunks = [
        (i, point, range(lo, min(lo + chunk, config.trials)))
        for i, point in enumerate(points)
        for lo in range(0, config.trials, chunk)
    ]
    wins = [0] * len(points)
    spent = [0] * len(points)
    if workers <= 1:
        global _WORKER
        _WORKER = world
        outputs: Iterable[tuple[int, int, int]] = (_run_chunk(*c) for c in chunks)
        for i, w, s in outputs:
            wins[i] += w
            spent[i] += s
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(config, world.graph)
        ) as pool:
            futures = [pool.submit(_run_chunk, *c) for c in chunks]
            for fut in futures:
                i, w, s = fut.result()
                wins[i] += w
                spent[i] += s

    kind, size = world.label
    rows = []
    for i, pt in enumerate(points):
        prob = wins[i] / config.trials
        rows.append(
            ResultRow(
                kind, size, config.scheme, pt.K, pt.r, pt.p, pt.q, config.n_infected,
                config.trials, prob, math.sqrt(prob * (1 - prob) / config.trials),
                spent[i] / config.trials,
            )
        )
    return rows


def _fmt(x: float) -> str:
    return format(x, ".6g")


def write_csv(rows: Sequence[ResultRow], stream: TextIO) -> None:
    if not rows:
        raise ValueError("no rows to write")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            r.topology, r.d_or_n, r.scheme, r.K, r.r, _fmt(r.p), _fmt(r.q), r.N, r.trials,
            _fmt(r.detection_probability), _fmt(r.stderr), _fmt(r.mean_budget_spent),
        ])


def read_csv(stream: TextIO) -> list[ResultRow]:
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    return [
        ResultRow(
            rec["topology"], int(rec["d_or_n"]), rec["scheme"], int(rec["K"]), int(rec["r"]),
            float(rec["p"]), float(rec["q"]), int(rec["N"]), int(rec["trials"]),
            float(rec["detect_prob"]), float(rec["stderr"]), float(rec["mean_budget"]),
        )
        for rec in reader
    ]
