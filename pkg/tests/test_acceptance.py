"""End-to-end acceptance checks, one or more tests per numbered criterion.

Each test is tagged ``criterion(n)``; the terminal summary prints one
PASS/FAIL/SKIP line per criterion together with the measured values.
"""

import io
import math
import os
import random
import time
from collections import Counter
from pathlib import Path

import networkx as nx
import numpy as np
import pytest
from scipy.stats import binom, chisquare

from rumorquery.bounds import (
    BoundInputs,
    adaptivity_gap_envelope,
    distance_pmf,
    distance_pmf_exact,
    distance_pmf_single_hop_exact,
    f_a,
    f_la,
    f_ln,
    f_n,
    necessary_budget_na,
    sufficient_budget_ad,
    sufficient_budget_na,
)
from rumorquery.centrality import rumor_centrality_tree, subtree_sizes
from rumorquery.diffusion import hop_distance, simulate_si
from rumorquery.estimators import (
    EstimatorConfig,
    mvad,
    mvna,
    r_star_ad_sufficient,
    r_star_na_sufficient,
)
from rumorquery.harness import ExperimentConfig, TopologySpec, run_experiment, write_csv
from rumorquery.querying import TruthfulnessParams, ask
from rumorquery.topology import RegularTree, load_edge_list_file

from helpers import count_infection_orderings, random_tree_edges, snapshot_from_edges, two_sigma

WORKERS = os.cpu_count() or 1


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_rumor_centrality_equals_ordering_counts(detail):
    start = time.perf_counter()
    trees = [[]]  # the single-node tree
    for n in range(2, 9):
        trees.extend(list(t.edges) for t in nx.nonisomorphic_trees(n))
    shapes = len(trees)
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 8)
        labels = rng.sample(range(1000), n)
        trees.append(random_tree_edges(n, rng, labels))

    checked = 0
    for edges in trees:
        nodes = {v for e in edges for v in e} or {0}
        snap = snapshot_from_edges(edges, min(nodes), nodes=nodes)
        scores = rumor_centrality_tree(snap)
        for v in snap.infected:
            exact = count_infection_orderings(snap.adjacency, v)
            approx = math.exp(scores.log_score[v])
            assert abs(approx - exact) <= 1e-9 * exact
            assert round(approx) == exact
            checked += 1
    elapsed = time.perf_counter() - start
    detail(f"{shapes} shapes + 200 random trees, {checked} roots exact in {elapsed:.2f}s")
    assert elapsed < 10


# 2 -------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_neighbor_ratio_law(detail):
    rng = random.Random(2)
    worst = 0.0
    for _ in range(100):
        n = rng.randint(2, 200)
        snap = snapshot_from_edges(random_tree_edges(n, rng), 0)
        log_r = rumor_centrality_tree(snap).log_score
        for u in snap.infected:
            for v in snap.adjacency[u]:
                t = subtree_sizes(snap, v)[u] if n <= 40 else None
                if t is None:
                    # subtree of u hanging off v, by a local BFS that avoids v
                    seen, stack = {u, v}, [u]
                    while stack:
                        x = stack.pop()
                        for y in snap.adjacency[x]:
                            if y not in seen:
                                seen.add(y)
                                stack.append(y)
                    t = len(seen) - 1
                err = abs((log_r[u] - log_r[v]) - (math.log(t) - math.log(n - t)))
                worst = max(worst, err)
    detail(f"max log-domain error {worst:.2e} over 100 trees")
    assert worst <= 1e-9


# 3 -------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_distance_pmf(detail):
    start = time.perf_counter()
    worst = max(
        abs(sum(distance_pmf(3, k, l) for l in range(1, k)) - 1.0) for k in range(2, 9)
    )
    assert all(sum(distance_pmf_exact(3, k, l) for l in range(1, k)) == 1 for k in range(2, 9))
    assert worst <= 1e-12

    for d in (3, 4, 5):
        for k in range(2, 11):
            assert distance_pmf_single_hop_exact(d, k) == distance_pmf_exact(d, k, 1)

    n = 100_000
    rng = random.Random(3)
    tree = RegularTree(3)
    hits = 0
    for _ in range(n):
        snap = simulate_si(tree, 0, 6, rng.getrandbits(32))
        hits += hop_distance(snap, 0, snap.infected[-1]) == 3
    p = distance_pmf(3, 6, 3)
    sigma = math.sqrt(p * (1 - p) / n)
    z = (hits / n - p) / sigma
    elapsed = time.perf_counter() - start
    detail(
        f"normalization error {worst:.1e}; P(d=3 | k=6) exact {p:.5f} vs MC {hits / n:.5f} "
        f"(z={z:+.2f}); single-hop forms agree; {elapsed:.1f}s"
    )
    assert abs(z) <= 4
    assert elapsed < 60


# 4 -------------------------------------------------------------------------

def _binomial_chisquare(counts: Counter, r: int, prob: float, n: int) -> float:
    expected = [n * binom.pmf(k, r, prob) for k in range(r + 1)]
    observed = [counts[k] for k in range(r + 1)]
    # pool sparse tail bins so every expected count is at least 5
    obs_bins, exp_bins, o_acc, e_acc = [], [], 0, 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= 5:
            obs_bins.append(o_acc)
            exp_bins.append(e_acc)
            o_acc, e_acc = 0, 0.0
    if e_acc:
        obs_bins[-1] += o_acc
        exp_bins[-1] += e_acc
    return chisquare(obs_bins, exp_bins).pvalue


@pytest.mark.criterion(4)
@pytest.mark.parametrize("p, r", [(0.7, 5), (2 / 3, 9), (0.9, 3)])
def test_query_oracle_laws(p, r, detail):
    snap = simulate_si(RegularTree(3), 0, 40, seed=4)
    params = TruthfulnessParams(p, 0.6)
    rng = random.Random(int(p * 1000) + r)
    n = 10_000
    non_source = snap.infected[7]
    pvalues = {}
    for who, prob in ((snap.source, p), (non_source, 1 - p)):
        counts = Counter()
        for _ in range(n):
            t = ask(snap, params, who, r, rng)
            assert t.yes_count + sum(t.designations.values()) == r
            counts[t.yes_count] += 1
        pvalues["source" if who == snap.source else "non-source"] = _binomial_chisquare(counts, r, prob, n)
    detail(f"p={p:.3g} r={r}: " + ", ".join(f"{k} chi2 p={v:.3f}" for k, v in pvalues.items()))
    assert all(v > 0.001 for v in pvalues.values())


# 5 -------------------------------------------------------------------------

PERFECT = TruthfulnessParams(1.0, 1.0)


@pytest.mark.criterion(5)
def test_perfect_information_mvna(detail):
    hits = 0
    for seed in range(100):
        snap = simulate_si(RegularTree(3), 0, 100, seed)
        r = 1 + seed % 4
        hits += mvna(snap, EstimatorConfig(r * snap.size + seed % 3, r, PERFECT, seed)).estimate == snap.source
    detail(f"MVNA {hits}/100")
    assert hits == 100


@pytest.mark.criterion(5)
def test_perfect_information_mvad_path_oracle(detail):
    rng = random.Random(5)
    agree = total = successes = 0
    for _ in range(300):
        snap = simulate_si(RegularTree(rng.choice([3, 4])), 0, rng.randint(2, 300), rng.getrandbits(32))
        hops = hop_distance(snap, rumor_centrality_tree(snap).center, snap.source)
        r = rng.randint(1, 4)
        K = r * rng.randint(1, 8) + rng.randrange(r)
        success = mvad(snap, EstimatorConfig(K, r, PERFECT, rng.getrandbits(32))).estimate == snap.source
        agree += success == (hops < K // r)
        successes += success
        total += 1
    detail(f"MVAD agrees with path oracle on {agree}/{total} ({successes} successes)")
    assert agree == total


# 6 -------------------------------------------------------------------------

def _sweep(scheme, K, p, q):
    cfg = ExperimentConfig(
        TopologySpec.parse("tree:d=3"), 400, 200, scheme, tuple(K), tuple(p), tuple(q),
        r="auto", base_seed=42,
    )
    return run_experiment(cfg, workers=WORKERS)


@pytest.fixture(scope="module")
def reproduction():
    start = time.perf_counter()
    third = 2 / 3
    grid = (25, 50, 100, 200, 400)
    levels_p = (0.55, 0.67, 0.8, 0.95)
    levels_q = (0.4, 0.55, 0.7, 0.9)
    out = {
        "rc": _sweep("rc", (100,), (third,), (third,))[0],
        "na_K": _sweep("na", grid, (third,), (third,)),
        "ad_K": _sweep("ad", grid, (third,), (third,)),
        "na_p": _sweep("na", (200,), levels_p, (third,)),
        "ad_p": _sweep("ad", (100,), levels_p, (third,)),
        "na_q": _sweep("na", (200,), (third,), levels_q),
        "ad_q": _sweep("ad", (100,), (third,), levels_q),
    }
    out["elapsed"] = time.perf_counter() - start
    return out


def _fmt(rows, key):
    return " ".join(f"{getattr(r, key):g}:{r.detection_probability:.3f}" for r in rows)


@pytest.mark.slow
@pytest.mark.criterion(6)
def test_schemes_beat_rumor_center(reproduction, detail):
    rc = reproduction["rc"]
    detail(f"RC {rc.detection_probability:.3f}; NA by K {_fmt(reproduction['na_K'], 'K')}; "
           f"AD by K {_fmt(reproduction['ad_K'], 'K')}; {reproduction['elapsed']:.0f}s on {WORKERS} worker(s)")
    for row in reproduction["na_K"] + reproduction["ad_K"]:
        assert row.detection_probability - rc.detection_probability > two_sigma(row.stderr, rc.stderr)


@pytest.mark.slow
@pytest.mark.criterion(6)
def test_adaptive_not_worse_at_equal_budget(reproduction, detail):
    na = next(r for r in reproduction["na_K"] if r.K == 100)
    ad = next(r for r in reproduction["ad_K"] if r.K == 100)
    detail(f"K=100: AD {ad.detection_probability:.3f} vs NA {na.detection_probability:.3f}")
    assert ad.detection_probability >= na.detection_probability - two_sigma(ad.stderr, na.stderr)


@pytest.mark.slow
@pytest.mark.criterion(6)
def test_nonadaptive_nondecreasing_in_budget(reproduction):
    rows = reproduction["na_K"]
    for a, b in zip(rows, rows[1:]):
        assert b.detection_probability >= a.detection_probability - two_sigma(a.stderr, b.stderr)


@pytest.mark.slow
@pytest.mark.criterion(6)
@pytest.mark.parametrize("key", ["na_p", "ad_p", "na_q", "ad_q"])
def test_nondecreasing_in_truthfulness(reproduction, key, detail):
    rows = reproduction[key]
    axis = key[-1]
    detail(f"{key[:2].upper()} by {axis} {_fmt(rows, axis)}")
    for a, b in zip(rows, rows[1:]):
        assert b.detection_probability >= a.detection_probability - two_sigma(a.stderr, b.stderr)


# 7 -------------------------------------------------------------------------

@pytest.mark.criterion(7)
def test_bound_calculators(detail):
    d = 3
    ps = np.linspace(0.5, 1.0, 21)[1:]
    qs = np.linspace(1 / d, 1.0, 21)[1:]
    for f in (f_ln, f_n, f_la, f_a):
        assert all(f(p, q, d) > 0 for p in ps for q in qs)
        assert f(0.5 + 1e-9, 1 / d + 1e-9, d) < 1e-8

    pairs = 0
    for delta in (0.1, 0.05, 0.01, 1e-3, 1e-4):
        for p in ps:
            for q in qs:
                inp = BoundInputs(delta, p, q, d)
                assert necessary_budget_na(inp).budget <= sufficient_budget_na(inp).budget
                pairs += 1

    for p in (0.8, 1.0):
        for delta in np.geomspace(0.2, 1e-9, 50):
            env = adaptivity_gap_envelope(BoundInputs(delta, p, 2 / 3, d))
            assert env.lower <= env.upper

    ratios = []
    for k in range(1, 7):
        inp = BoundInputs(10.0**-k, 2 / 3, 2 / 3, d)
        ratios.append(sufficient_budget_ad(inp).budget / sufficient_budget_na(inp).budget)
    detail(
        f"{pairs} necessary<=sufficient pairs; AD/NA sufficient ratios "
        + " ".join(f"{x:.3g}" for x in ratios)
    )
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


# 8 -------------------------------------------------------------------------

@pytest.mark.criterion(8)
def test_r_star_band(detail):
    values = {
        "NA (2/3,2/3,d=3,K=200)": r_star_na_sufficient(2 / 3, 2 / 3, 3, 200),
        "AD (2/3,2/3,d=3,K=100)": r_star_ad_sufficient(2 / 3, 2 / 3, 3, 100),
        "AD (4/9,4/9,d=3,K=100)": r_star_ad_sufficient(4 / 9, 4 / 9, 3, 100),
    }
    detail(", ".join(f"{k}={v}" for k, v in values.items()))
    assert all(1 <= v <= 12 for v in values.values())


# 9 -------------------------------------------------------------------------

@pytest.mark.criterion(9)
@pytest.mark.parametrize("topology, scheme", [("tree:d=3", "ad"), ("er:n=1000,deg=4", "na")])
def test_byte_identical_across_workers(topology, scheme, detail):
    cfg = ExperimentConfig(
        TopologySpec.parse(topology), 100, 30, scheme, (20, 60), (0.7,), (0.6, 0.8), base_seed=9,
    )
    texts = set()
    for workers in (1, 2, 3):
        buf = io.StringIO()
        write_csv(run_experiment(cfg, workers=workers, chunk=4 + workers), buf)
        texts.add(buf.getvalue())
    buf = io.StringIO()
    write_csv(run_experiment(cfg), buf)
    texts.add(buf.getvalue())
    detail(f"{topology} {scheme}: {len(texts)} distinct CSV over 4 runs with 1-3 workers")
    assert len(texts) == 1


# 10 ------------------------------------------------------------------------

def _facebook_path() -> Path | None:
    env = os.environ.get("RUMORQUERY_FACEBOOK_EDGES")
    candidates = [Path(env)] if env else []
    root = Path(__file__).resolve().parent.parent
    candidates += [root / "data" / "facebook_combined.txt", root / "data" / "facebook_combined.txt.gz"]
    return next((p for p in candidates if p.is_file()), None)


@pytest.mark.slow
@pytest.mark.criterion(10)
def test_facebook_ego_network(detail):
    path = _facebook_path()
    if path is None:
        pytest.skip(
            "SNAP facebook_combined edge list not found; set RUMORQUERY_FACEBOOK_EDGES "
            "or place it at data/facebook_combined.txt(.gz)"
        )
    graph = load_edge_list_file(path)
    assert (graph.node_count, graph.edge_count) == (4039, 88234)

    start = time.perf_counter()
    common = dict(n_infected=400, trials=50, K_grid=(100,), p_grid=(2 / 3,), q_grid=(2 / 3,), base_seed=10)
    spec = TopologySpec.parse(f"file:{path}")
    ad = run_experiment(ExperimentConfig(spec, scheme="ad", **common), workers=WORKERS)[0]
    elapsed = time.perf_counter() - start
    rc = run_experiment(ExperimentConfig(spec, scheme="rc", **common), workers=WORKERS)[0]
    detail(
        f"4039 nodes / 88234 edges; AD {ad.detection_probability:.3f} vs RC "
        f"{rc.detection_probability:.3f}; AD run {elapsed:.0f}s"
    )
    assert elapsed < 300
    assert ad.detection_probability - rc.detection_probability > two_sigma(ad.stderr, rc.stderr)
