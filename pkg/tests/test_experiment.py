import csv
import io
import json
from math import comb

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from uonet import (USERS, BipartiteGraph, SweepConfig, filter_with_report,
                   make_planted_bipartite, project, random_baseline, run_sweep, southern_women,
                   tfidf_reweight)
from uonet.errors import EmptyGraphError
from uonet.experiment import DEFAULT_THRESHOLDS, config_keys, measure

SMALL = dict(thresholds=(0.1, 1.0, 2.0, 3.0), replicates=3, louvain_restarts=2)


@pytest.fixture(scope="module")
def planted():
    return make_planted_bipartite(seed=5, users_per_block=20, objects_per_block=16)


@pytest.fixture(scope="module")
def small_report(planted):
    return run_sweep(planted.graph, SweepConfig(master_seed=11, **SMALL))


# --- config -------------------------------------------------------------------

def test_default_thresholds():
    assert DEFAULT_THRESHOLDS[0] == 0.1
    assert DEFAULT_THRESHOLDS[1:] == tuple(np.arange(1, 13) * 0.5)
    assert SweepConfig().replicates == 100


@pytest.mark.parametrize("kw", [
    dict(thresholds=()),
    dict(thresholds=(1.0, 0.5)),
    dict(thresholds=(1.0, 1.0)),
    dict(thresholds=(-0.1,)),
    dict(replicates=0),
    dict(n_jobs=0),
    dict(louvain_restarts=0),
    dict(projection_side="items"),
])
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        SweepConfig(**kw)


def test_config_from_text():
    text = """
    thresholds = 0.1, 0.5 1.0 2.5 3.0
    threshold_cap = 2.5   # audioscrobbler-style cap
    replicates = 7
    use_weights = no
    input = data.tsv
    """
    cfg, extra = SweepConfig.from_text(text)
    assert cfg.thresholds == (0.1, 0.5, 1.0, 2.5)
    assert cfg.replicates == 7 and cfg.use_weights is False
    assert extra == {"input": "data.tsv"}
    assert config_keys(text) == {"thresholds", "threshold_cap", "replicates", "use_weights", "input"}


def test_cap_applies_to_default_thresholds():
    cfg, _ = SweepConfig.from_text("threshold_cap = 2.5")
    assert cfg.thresholds == tuple(t for t in DEFAULT_THRESHOLDS if t <= 2.5)


# --- random baseline ------------------------------------------------------------

@pytest.mark.parametrize("k", [0, 1, 17, 40])
def test_baseline_edge_parity(k):
    g = tfidf_reweight(southern_women())
    r = random_baseline(g, k, seed=3)
    assert r.n_edges == g.n_edges - k
    assert set(r.edges()) <= set(g.edges())
    assert np.all(r.user_degrees() > 0) and np.all(r.object_degrees() > 0)


def test_baseline_extremes_and_determinism(toy):
    assert random_baseline(toy, 0, seed=1) == toy
    assert random_baseline(toy, toy.n_edges, seed=1).is_empty()
    assert random_baseline(toy, 5, seed=9) == random_baseline(toy, 5, seed=9)


@pytest.mark.parametrize("k", [-1, 14, 2.5])
def test_baseline_rejects(toy, k):
    with pytest.raises(ValueError):
        random_baseline(toy, k, seed=0)


def test_baseline_is_uniform():
    # each edge of a 6-edge graph should be dropped in about half of 4000 draws
    g = southern_women().edge_subgraph(np.arange(89) < 6)
    drops = np.zeros(g.n_edges)
    for s in range(4000):
        kept = {(u, o) for u, o, _ in random_baseline(g, 3, seed=s).edges()}
        drops += [(u, o) not in kept for u, o, _ in g.edges()]
    assert np.all(np.abs(drops / 4000 - 0.5) < 0.04)


# --- planted synthetic ----------------------------------------------------------

def _components(pg):
    adj = coo_matrix((pg.weights, (pg.src, pg.dst)), shape=(pg.n_nodes, pg.n_nodes))
    return connected_components(adj, directed=False)


def test_planted_without_popular_objects_splits_into_blocks():
    pb = make_planted_bipartite(blocks=3, popular_objects=0, seed=1)
    pg = project(pb.graph, USERS)
    n, labels = _components(pg)
    assert n == 3
    idx = {u: labels[i] for i, u in enumerate(pg.nodes)}
    for u, b in pb.user_blocks.items():
        assert idx[u] == idx[f"u{b}_0"]


@pytest.mark.parametrize("popular", [1, 3])
def test_planted_popular_objects_connect(popular):
    pb = make_planted_bipartite(popular_objects=popular, seed=2)
    pg = project(pb.graph, USERS)
    assert _components(pg)[0] == 1
    # every user pair shares all popular objects
    assert pg.n_edges == comb(100, 2)
    alone = project(make_planted_bipartite(popular_objects=0, seed=2).graph, USERS)
    assert pg.n_edges - alone.n_edges >= comb(100, 2) - 2 * comb(50, 2)


def test_planted_balanced_and_weighted():
    pb = make_planted_bipartite(seed=4)
    g = pb.graph
    private = [j for j, o in enumerate(g.objects) if o.startswith("o")]
    deg = g.object_degrees()
    for b in (0, 1):
        d = [deg[j] for j in private if g.objects[j].startswith(f"o{b}_")]
        assert max(d) - min(d) <= 1
    w = {(u, o): x for u, o, x in g.edges()}
    assert all(x == 1.0 for (u, o), x in w.items() if o.startswith("pop"))
    assert {x for (u, o), x in w.items() if o.startswith("o")} <= {1.0, 2.0, 3.0, 4.0, 5.0}
    assert g.user_degrees().tolist() == [11] * 100


def test_planted_rejects():
    with pytest.raises(ValueError):
        make_planted_bipartite(blocks=0)
    with pytest.raises(ValueError):
        make_planted_bipartite(popular_objects=-1)


# --- sweep ----------------------------------------------------------------------

def test_sweep_rows(small_report, planted):
    rep = small_report
    assert [r.tau for r in rep.rows] == list(SMALL["thresholds"])
    ratios = [r.edges_removed_ratio for r in rep.rows]
    assert all(0 <= x <= 1 for x in ratios)
    assert ratios == sorted(ratios)
    for r in rep.rows:
        assert len(r.random_modularity) == SMALL["replicates"]
        assert r.edges_removed == round(r.edges_removed_ratio * planted.graph.n_edges)
    assert rep.baseline["users"] == planted.graph.n_users


def test_sweep_row_matches_direct_pipeline(small_report, planted):
    w = tfidf_reweight(planted.graph)
    row = small_report.rows[2]
    f, report = filter_with_report(w, row.tau)
    m = measure(f, USERS, row.louvain_seed, restarts=SMALL["louvain_restarts"])
    assert (m.users_remaining, m.projected_density, m.modularity, m.communities) == (
        row.real_users_remaining, row.real_projected_density, row.real_modularity,
        row.real_communities)
    assert report.edges_removed == row.edges_removed


def test_sweep_planted_modularity_trend():
    pb = make_planted_bipartite(seed=0)
    rep = run_sweep(pb.graph, SweepConfig(thresholds=(0.1, 0.5, 1.0, 1.5, 2.0), replicates=1,
                                          master_seed=2))
    q = [r.real_modularity for r in rep.rows]
    assert all(b >= a - 0.02 for a, b in zip(q, q[1:]))


def test_empty_threshold_records_nulls(toy):
    rep = run_sweep(toy, SweepConfig(thresholds=(0.0, 100.0), replicates=2))
    last = rep.rows[-1]
    assert last.edges_removed_ratio == 1.0 and last.real_users_remaining == 0
    assert last.real_modularity is None and last.real_projected_density is None
    assert last.random_modularity_mean is None
    json.loads(rep.to_json())


def test_sweep_rejects_empty_graph():
    with pytest.raises(EmptyGraphError):
        run_sweep(BipartiteGraph([], [], [], [], []))


def test_report_files(small_report, tmp_path):
    paths = small_report.write(tmp_path)
    assert sorted(p.name for p in paths) == ["density.csv", "edges_users.csv",
                                             "modularity.csv", "report.json"]
    rows = list(csv.DictReader(io.StringIO((tmp_path / "edges_users.csv").read_text())))
    assert {r["metric"] for r in rows} == {"edges_removed_ratio", "users_remaining"}
    for r in rows:
        if r["metric"] == "edges_removed_ratio":
            assert r["real"] == r["random_mean"] and float(r["random_std"]) == 0.0
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["provenance"]["rng"].startswith("numpy PCG64")
    assert len(data["provenance"]["dataset_sha256"]) == 64
    assert data["rows"][0]["random_modularity_mean"] == small_report.rows[0].random_modularity_mean


def test_sweep_is_reproducible_and_job_count_free(small_report, planted):
    again = run_sweep(planted.graph, SweepConfig(master_seed=11, **SMALL))
    parallel = run_sweep(planted.graph, SweepConfig(master_seed=11, n_jobs=2, **SMALL))
    assert again.to_json() == small_report.to_json()
    assert parallel.to_json().replace('"n_jobs": 2', '"n_jobs": 1') == small_report.to_json()


def test_different_seed_changes_replicates(small_report, planted):
    other = run_sweep(planted.graph, SweepConfig(master_seed=12, **SMALL))
    assert other.rows[1].random_users_remaining != small_report.rows[1].random_users_remaining \
        or other.rows[1].random_modularity != small_report.rows[1].random_modularity
