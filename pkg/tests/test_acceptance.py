"""Acceptance suite: one or more tests per criterion, summarised at the end of the run.

Run on its own with ``pytest tests/test_acceptance.py``. Criterion 8 needs
the real datasets: point ``UONET_DATA_<NAME>`` (``LASTFM``, ``TWITTER``,
``AUDIOSCROBBLER``, ``MOVIELENS``, ``DELICIOUS``) at a user-object edge list.
``UONET_DATA_DELIMITER`` (default tab) and ``UONET_DATA_HEADER=1`` describe
the files.
"""
import io
import json
import math
import os
import time
from collections import defaultdict
from itertools import combinations

import numpy as np
import pytest

from uonet import (OBJECTS, USERS, CandidateModel, ProjectedGraph, SweepConfig, best_fit,
                   filter_by_threshold, fit_model, louvain, make_planted_bipartite, modularity,
                   project, random_baseline, run_sweep, southern_women, tfidf_reweight)
from uonet.cli import main
from uonet.distfit import EXPONENTIAL, LOGNORMAL, MODEL_KINDS, POWERLAW, STRETCHED_EXPONENTIAL

from conftest import brute_modularity, random_bipartite, random_graph, set_partitions

criterion = pytest.mark.criterion


# --- 1 ----------------------------------------------------------------------------

def _southern_women_groups(seed):
    g = tfidf_reweight(southern_women())
    f = filter_by_threshold(g, 1.0)
    part = louvain(project(f, USERS), seed=seed)
    return {frozenset(c) for c in part.communities()}, set(g.users) - set(f.users)


@criterion(1, "Southern Women: groups {1..9} and {10..18} minus 16, seed independent, < 1 s")
def test_c1_southern_women():
    start = time.perf_counter()
    groups, absent = _southern_women_groups(0)
    elapsed = time.perf_counter() - start
    assert groups == {frozenset(str(i) for i in range(1, 10)),
                      frozenset(str(i) for i in range(10, 19) if i != 16)}
    assert absent == {"16"}
    assert elapsed < 1.0
    for seed in range(1, 30):
        assert _southern_women_groups(seed) == (groups, absent)


# --- 2 ----------------------------------------------------------------------------

def _direct_tfidf(records):
    """w_new from dicts: f = w / max_user_weight, idf = ln(n_u / d(o))."""
    by_user = defaultdict(dict)
    deg = defaultdict(int)
    for u, o, w in records:
        by_user[u][o] = w
        deg[o] += 1
    n_u = len(by_user)
    return {(u, o): (w / max(ws.values())) * math.log(n_u / deg[o])
            for u, ws in by_user.items() for o, w in ws.items()}


@criterion(2, "tf-idf matches direct evaluation on 1000 graphs; universal objects 0; "
              "per-user rescaling invariant; < 10 s")
def test_c2_tfidf_semantics():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    universal_seen = 0
    for _ in range(1000):
        n_u, n_o = (int(v) for v in rng.integers(1, 9, size=2))
        g = random_bipartite(rng, n_u, n_o, rng.uniform(0.2, 0.9), max_weight=9)
        if g.is_empty():
            continue
        recs = list(g.edges())
        w = tfidf_reweight(g, base=math.e)
        expected = _direct_tfidf(recs)
        got = {(u, o): x for u, o, x in w.edges()}
        assert got.keys() == expected.keys()
        for key, x in got.items():
            assert abs(x - expected[key]) <= 1e-12
        deg = g.object_degrees()
        for j in np.flatnonzero(deg == g.n_users):
            universal_seen += 1
            assert np.all(w.weights[g.edge_objects == j] == 0.0)
        scale = rng.uniform(0.01, 100.0, size=g.n_users)
        scaled = tfidf_reweight(g.with_weights(g.weights * scale[g.edge_users]), base=math.e)
        assert np.all(np.abs(scaled.weights - w.weights) <= 1e-12)
    assert universal_seen > 0
    assert time.perf_counter() - start < 10


# --- 3 ----------------------------------------------------------------------------

def _brute_projection(g, side):
    nbrs = defaultdict(set)
    for u, o, _ in g.edges():
        if side == USERS:
            nbrs[u].add(o)
        else:
            nbrs[o].add(u)
    nodes = g.users if side == USERS else g.objects
    out = {}
    for a, b in combinations(nodes, 2):
        c = len(nbrs[a] & nbrs[b])
        if c:
            out[frozenset((a, b))] = c
    return out


@criterion(3, "projection equals all-pairs common-neighbour counts on 500 graphs; < 10 s")
def test_c3_projection_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 500:
        n_u = int(rng.integers(1, 20))
        n_o = int(rng.integers(1, 21 - n_u))
        g = random_bipartite(rng, n_u, n_o, rng.uniform(0.05, 0.9))
        if g.is_empty():
            continue
        for side in (USERS, OBJECTS):
            got = {frozenset((a, b)): w for a, b, w in project(g, side).edges()}
            assert got == _brute_projection(g, side)
        checked += 1
    assert time.perf_counter() - start < 10


# --- 4 ----------------------------------------------------------------------------

def _all_graphs(n):
    pairs = list(combinations(range(n), 2))
    for mask in range(1, 2 ** len(pairs)):
        edges = [(f"n{a}", f"n{b}") for k, (a, b) in enumerate(pairs) if mask >> k & 1]
        yield edges


@criterion(4, "modularity matches the formula on 200 graphs (< 1e-10); Louvain within 0.05 "
              "of the enumerated optimum on graphs <= 8 nodes; < 60 s")
def test_c4_modularity_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 11))
        g = random_graph(rng, n, rng.uniform(0.2, 0.9), max_weight=5)
        if g.n_edges == 0:
            continue
        labels = rng.integers(0, n, size=n)
        assert abs(modularity(g, labels) - brute_modularity(g, labels)) < 1e-10
        checked += 1

    def within(g, seed):
        best = max(brute_modularity(g, lab) for lab in set_partitions(g.n_nodes))
        q = louvain(g, seed=seed).modularity
        assert best - 0.05 <= q <= best + 1e-12

    # every unweighted graph on up to five nodes
    for n in range(2, 6):
        nodes = [f"n{i}" for i in range(n)]
        for edges in _all_graphs(n):
            within(ProjectedGraph.from_edges(edges, nodes=nodes), seed=n)
    # random weighted graphs on six to eight nodes
    done = 0
    while done < 300:
        n = int(rng.integers(6, 9))
        g = random_graph(rng, n, rng.uniform(0.15, 0.9), max_weight=4)
        if g.n_edges == 0:
            continue
        within(g, seed=int(rng.integers(2**32)))
        done += 1
    assert time.perf_counter() - start < 60


# --- 5 ----------------------------------------------------------------------------

GENERATORS = {
    EXPONENTIAL: {"lam": 0.054},
    POWERLAW: {"alpha": 2.05},
    LOGNORMAL: {"mu": 2.84, "sigma": 1.0},
    STRETCHED_EXPONENTIAL: {"lam": 0.05, "beta": 0.5},
}
N_DRAWS = 100_000
TRIALS = 100
C5 = ("exponential lambda within 5% and power-law alpha within 0.05 at n = 1e5; best_fit "
      "picks the generating family in >= 95 of 100 trials per family; < 5 min")


@pytest.fixture(scope="module")
def c5_clock():
    return {"start": time.perf_counter()}


@criterion(5, C5)
def test_c5_parameter_recovery(c5_clock):
    x = CandidateModel(EXPONENTIAL, GENERATORS[EXPONENTIAL]).sample(N_DRAWS, 50)
    lam = fit_model(x, EXPONENTIAL).params["lam"]
    assert abs(lam - 0.054) <= 0.05 * 0.054
    x = CandidateModel(POWERLAW, GENERATORS[POWERLAW]).sample(N_DRAWS, 51)
    alpha = fit_model(x, POWERLAW).params["alpha"]
    assert abs(alpha - 2.05) <= 0.05


@criterion(5, C5)
@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_c5_family_selection(kind, c5_clock):
    seeds = np.random.SeedSequence([5, MODEL_KINDS.index(kind)]).spawn(TRIALS)
    hits = 0
    for s in seeds:
        x = CandidateModel(kind, GENERATORS[kind]).sample(N_DRAWS, np.random.default_rng(s))
        hits += best_fit(x).best == kind
    print(f"{kind}: {hits}/{TRIALS}")
    assert hits >= 95
    assert time.perf_counter() - c5_clock["start"] < 300


# --- 6, 7 -------------------------------------------------------------------------

PLANTED_SEED = 0


@pytest.fixture(scope="module")
def planted_sweep():
    pb = make_planted_bipartite(blocks=2, users_per_block=50, objects_per_block=40,
                                popular_objects=3, seed=PLANTED_SEED)
    start = time.perf_counter()
    report = run_sweep(pb.graph, SweepConfig(replicates=25, master_seed=PLANTED_SEED))
    return pb, report, time.perf_counter() - start


@criterion(6, "planted synthetic: real density <= random mean and real Q >= random mean for "
              "removal in (0, 0.95), some gap > 0.05; < 5 min")
def test_c6_real_vs_random(planted_sweep):
    _, report, elapsed = planted_sweep
    gaps = []
    for row in report.rows:
        if not 0 < row.edges_removed_ratio < 0.95:
            continue
        assert row.real_projected_density <= row.random_projected_density_mean
        assert row.real_modularity >= row.random_modularity_mean
        gaps.append(row.real_modularity - row.random_modularity_mean)
    assert gaps and max(gaps) > 0.05
    assert elapsed < 300


@criterion(7, "planted synthetic: real users remaining >= random mean at every tau")
def test_c7_user_retention(planted_sweep):
    _, report, _ = planted_sweep
    for row in report.rows:
        assert row.real_users_remaining >= row.random_users_remaining_mean


# --- 8 ----------------------------------------------------------------------------

# (n_u, n_o, m, density, user projection density, object projection density),
# densities as printed, in percent
TABLES = {
    "LASTFM": (1892, 9748, 35813, "0.19", "38.3", "0.6"),
    "TWITTER": (1842, 3744, 13864, "0.2", "26.3", "1.2"),
    "AUDIOSCROBBLER": (183, 21443, 39195, "1", "62.7", "4.9"),
    "MOVIELENS": (2000, 3336, 192922, "2.9", "89.3", "51.7"),
    "DELICIOUS": (973, 28695, 126007, "0.45", "83.7", "1.8"),
}


def _matches_printed(value, printed):
    """``value`` (a fraction) rounds to the percentage ``printed``."""
    decimals = len(printed.partition(".")[2])
    return abs(100 * value - float(printed)) <= 0.5 * 10 ** -decimals + 1e-12


@criterion(8, "stats reproduces the dataset tables (conditional on UONET_DATA_<NAME>)")
@pytest.mark.parametrize("name", sorted(TABLES))
def test_c8_dataset_tables(name):
    path = os.environ.get(f"UONET_DATA_{name}")
    if not path:
        pytest.skip(f"UONET_DATA_{name} not set")
    argv = ["stats", path, "--projections", "--json",
            "--delimiter", os.environ.get("UONET_DATA_DELIMITER", "\t")]
    if os.environ.get("UONET_DATA_HEADER", "") in ("1", "true", "yes"):
        argv.append("--header")
    out = io.StringIO()
    assert main(argv, stdout=out, stderr=io.StringIO()) == 0
    s = json.loads(out.getvalue())
    n_u, n_o, m, d, d_u, d_o = TABLES[name]
    assert (s["n_users"], s["n_objects"], s["n_edges"]) == (n_u, n_o, m)
    assert _matches_printed(s["density"], d)
    assert _matches_printed(s["projected_users_density"], d_u)
    assert _matches_printed(s["projected_objects_density"], d_o)


# --- 9 ----------------------------------------------------------------------------

@criterion(9, "seeded louvain, random_baseline and run_sweep repeat byte for byte; < 2 min")
def test_c9_determinism(tmp_path):
    start = time.perf_counter()
    pb = make_planted_bipartite(seed=9)
    w = tfidf_reweight(pb.graph)
    pg = project(filter_by_threshold(w, 1.0), USERS)

    def louvain_bytes():
        part = louvain(pg, seed=1234)
        return part.membership.tobytes() + np.float64(part.modularity).tobytes()

    assert louvain_bytes() == louvain_bytes()

    def baseline_bytes():
        r = random_baseline(w, 500, seed=77)
        return repr(list(r.edges())).encode()

    assert baseline_bytes() == baseline_bytes()

    cfg = SweepConfig(thresholds=(0.5, 1.5, 2.5), replicates=3, master_seed=99)
    first, second = run_sweep(pb.graph, cfg), run_sweep(pb.graph, cfg)
    assert first.to_json() == second.to_json()
    a, b = first.write(tmp_path / "a"), second.write(tmp_path / "b")
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]
    single = run_sweep(pb.graph, SweepConfig(thresholds=(1.0,), replicates=1, master_seed=3))
    assert single.to_json() == run_sweep(
        pb.graph, SweepConfig(thresholds=(1.0,), replicates=1, master_seed=3)).to_json()
    assert time.perf_counter() - start < 120
