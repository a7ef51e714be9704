"""Threshold sweep on tf-idf weighted networks against random edge removal.

For every threshold the tf-idf filtered network ("real") is compared with
``replicates`` networks that lose the same number of edges uniformly at
random. Both are projected onto one side, partitioned with Louvain and
measured.

Randomness: every work item gets its own ``numpy.random.PCG64`` stream from
``SeedSequence(master_seed, spawn_key=(tau_index, replicate, stream))``;
replicate 0 is the real network. Results do not depend on the number of
worker processes.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .community import DEFAULT_RESTARTS, louvain
from .errors import UndefinedMetricError
from .graph import USERS, BipartiteGraph, _check_side, projected_density, require_nonempty
from .projection import project
from .weighting import DEFAULT_LOG_BASE, filter_with_report, tfidf_reweight

log = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = (0.1,) + tuple(0.5 * k for k in range(1, 13))
RNG_DESCRIPTION = "numpy PCG64 via SeedSequence(master_seed, spawn_key=(tau_index, replicate, stream))"

_STREAM_REMOVE = 0
_STREAM_LOUVAIN = 1
_BASELINE_INDEX = 2**31 - 1


def _rng(master_seed, tau_index, replicate, stream):
    ss = np.random.SeedSequence(master_seed, spawn_key=(tau_index, replicate, stream))
    return np.random.Generator(np.random.PCG64(ss))


def _louvain_seed(master_seed, tau_index, replicate):
    return int(_rng(master_seed, tau_index, replicate, _STREAM_LOUVAIN).integers(2**63))


def _parse_config(text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.read_string("[sweep]\n" + text)
    return cp


def config_keys(text) -> set:
    """Keys set in a ``key = value`` config text."""
    return set(_parse_config(text)["sweep"])


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of a threshold sweep.

    ``thresholds`` must be strictly ascending. ``use_weights`` selects
    weighted (co-occurrence count) or unweighted Louvain on the projection;
    ``louvain_restarts`` is passed on to :func:`~uonet.community.louvain`.
    """

    thresholds: tuple = DEFAULT_THRESHOLDS
    replicates: int = 100
    master_seed: int = 0
    projection_side: str = USERS
    use_weights: bool = True
    log_base: float = DEFAULT_LOG_BASE
    n_jobs: int = 1
    louvain_restarts: int = DEFAULT_RESTARTS

    def __post_init__(self):
        ts = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, "thresholds", ts)
        if not ts:
            raise ValueError("at least one threshold is required")
        if any(not (math.isfinite(t) and t >= 0) for t in ts):
            raise ValueError("thresholds must be finite and >= 0")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("thresholds must be strictly ascending")
        if int(self.replicates) < 1:
            raise ValueError("replicates must be >= 1")
        if int(self.n_jobs) < 1:
            raise ValueError("n_jobs must be >= 1")
        if int(self.louvain_restarts) < 1:
            raise ValueError("louvain_restarts must be >= 1")
        _check_side(self.projection_side)

    @classmethod
    def from_file(cls, path) -> tuple["SweepConfig", dict]:
        """Read ``key = value`` lines (``#`` comments allowed).

        Returns the config plus the keys it does not own (e.g. ``input``,
        ``delimiter``) for the caller to interpret.
        """
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text) -> tuple["SweepConfig", dict]:
        cp = _parse_config(text)
        raw = dict(cp["sweep"])
        kw = {}
        if "thresholds" in raw:
            kw["thresholds"] = tuple(float(t) for t in raw.pop("thresholds").replace(",", " ").split())
        if "threshold_cap" in raw:
            cap = float(raw.pop("threshold_cap"))
            kw["thresholds"] = tuple(t for t in kw.get("thresholds", DEFAULT_THRESHOLDS) if t <= cap)
        for key, conv in (("replicates", int), ("master_seed", int), ("n_jobs", int),
                          ("louvain_restarts", int),
                          ("log_base", float), ("projection_side", str)):
            if key in raw:
                kw[key] = conv(raw.pop(key))
        if "use_weights" in raw:
            kw["use_weights"] = cp["sweep"].getboolean("use_weights")
            raw.pop("use_weights")
        return cls(**kw), raw


class Measurement(NamedTuple):
    users_remaining: int
    projected_density: float | None
    modularity: float | None
    communities: int


def measure(filtered: BipartiteGraph, side=USERS, seed=None, use_weights=True,
            restarts=DEFAULT_RESTARTS) -> Measurement:
    """Project ``filtered`` and run Louvain on the projection."""
    proj = project(filtered, side)
    try:
        dens = projected_density(proj)
    except UndefinedMetricError:
        dens = None
    part = louvain(proj, seed=seed, use_weights=use_weights, restarts=restarts)
    return Measurement(filtered.n_users, dens, part.modularity, part.community_count)


def random_baseline(graph: BipartiteGraph, edges_to_remove: int, seed=None) -> BipartiteGraph:
    """Remove ``edges_to_remove`` edges uniformly at random, then prune isolated nodes."""
    m = graph.n_edges
    k = int(edges_to_remove)
    if k != edges_to_remove or not 0 <= k <= m:
        raise ValueError(f"edges_to_remove must be an integer in [0, {m}], got {edges_to_remove}")
    rng = np.random.default_rng(seed)
    keep = np.ones(m, dtype=bool)
    keep[rng.choice(m, size=k, replace=False)] = False
    return graph.edge_subgraph(keep)


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    a = np.asarray(vals, dtype=float)
    return float(a.mean()), float(a.std())


@dataclass
class SweepRow:
    tau: float
    edges_removed: int
    edges_removed_ratio: float
    real_users_remaining: int
    real_objects_remaining: int
    real_projected_density: float | None
    real_modularity: float | None
    real_communities: int
    louvain_seed: int = 0
    random_users_remaining: list = field(default_factory=list)
    random_projected_density: list = field(default_factory=list)
    random_modularity: list = field(default_factory=list)

    @property
    def random_users_remaining_mean(self):
        return _stats(self.random_users_remaining)[0]

    @property
    def random_projected_density_mean(self):
        return _stats(self.random_projected_density)[0]

    @property
    def random_modularity_mean(self):
        return _stats(self.random_modularity)[0]

    def summary(self, metric):
        """``(real, random_mean, random_std)`` for one metric name."""
        if metric == "edges_removed_ratio":
            return self.edges_removed_ratio, self.edges_removed_ratio, 0.0
        real = getattr(self, f"real_{metric}")
        mean, std = _stats(getattr(self, f"random_{metric}"))
        return real, mean, std


_SERIES = {
    "edges_users.csv": ("edges_removed_ratio", "users_remaining"),
    "density.csv": ("projected_density",),
    "modularity.csv": ("modularity",),
}


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list
    provenance: dict
    baseline: dict

    def to_dict(self):
        rows = []
        for r in self.rows:
            d = asdict(r)
            for metric in ("users_remaining", "projected_density", "modularity"):
                mean, std = _stats(getattr(r, f"random_{metric}"))
                d[f"random_{metric}_mean"] = mean
                d[f"random_{metric}_std"] = std
            rows.append(d)
        return {"config": asdict(self.config), "provenance": self.provenance,
                "baseline": self.baseline, "rows": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def series_csv(self, name) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "metric", "real", "random_mean", "random_std"])
        for row in self.rows:
            for metric in _SERIES[name]:
                real, mean, std = row.summary(metric)
                w.writerow([repr(row.tau), metric] + ["" if v is None else repr(float(v))
                                                     for v in (real, mean, std)])
        return buf.getvalue()

    def write(self, outdir) -> list[Path]:
        """Write the three series CSVs and ``report.json`` into ``outdir``."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for name in _SERIES:
            p = outdir / name
            p.write_text(self.series_csv(name), encoding="utf-8")
            paths.append(p)
        p = outdir / "report.json"
        p.write_text(self.to_json() + "\n", encoding="utf-8")
        paths.append(p)
        return paths


def dataset_hash(graph: BipartiteGraph) -> str:
    h = hashlib.sha256()
    for u, o, w in zip(graph.edge_users, graph.edge_objects, graph.original_weights):
        h.update(f"{graph.users[u]}\t{graph.objects[o]}\t{w!r}\n".encode())
    return h.hexdigest()


# Worker state for process pools: the reweighted graph is shipped once.
_WORKER = {}


def _init_worker(graph, config):
    _WORKER["graph"] = graph
    _WORKER["config"] = config


def _replicate_task(args):
    ti, rep, k = args
    return _replicate(_WORKER["graph"], _WORKER["config"], ti, rep, k)


def _replicate(weighted, config, ti, rep, k):
    g = random_baseline(weighted, k, _rng(config.master_seed, ti, rep, _STREAM_REMOVE))
    return measure(g, config.projection_side, _louvain_seed(config.master_seed, ti, rep),
                   config.use_weights, config.louvain_restarts)


def run_sweep(graph: BipartiteGraph, config: SweepConfig | None = None) -> SweepReport:
    """Run the real-vs-random threshold sweep on ``graph``.

    ``graph`` carries original weights; tf-idf is applied once up front.
    A threshold whose filtered network is empty records ``None`` metrics.
    """
    config = config or SweepConfig()
    require_nonempty(graph)
    weighted = tfidf_reweight(graph, base=config.log_base)
    side = config.projection_side

    base = measure(weighted, side, _louvain_seed(config.master_seed, _BASELINE_INDEX, 0),
                   config.use_weights, config.louvain_restarts)
    rows, tasks = [], []
    for ti, tau in enumerate(config.thresholds):
        filtered, rep = filter_with_report(weighted, tau)
        lseed = _louvain_seed(config.master_seed, ti, 0)
        real = measure(filtered, side, lseed, config.use_weights, config.louvain_restarts)
        rows.append(SweepRow(tau, rep.edges_removed, rep.removed_ratio, rep.users_remaining,
                             rep.objects_remaining, real.projected_density, real.modularity,
                             real.communities, lseed))
        tasks.extend((ti, r, rep.edges_removed) for r in range(1, config.replicates + 1))
        log.debug("tau=%g removed=%d users=%d", tau, rep.edges_removed, rep.users_remaining)

    if config.n_jobs > 1:
        with ProcessPoolExecutor(config.n_jobs, initializer=_init_worker,
                                 initargs=(weighted, config)) as pool:
            results = list(pool.map(_replicate_task, tasks, chunksize=max(1, len(tasks) // (4 * config.n_jobs))))
    else:
        results = [_replicate(weighted, config, ti, r, k) for ti, r, k in tasks]

    for (ti, _, _), res in zip(tasks, results):
        row = rows[ti]
        row.random_users_remaining.append(res.users_remaining)
        row.random_projected_density.append(res.projected_density)
        row.random_modularity.append(res.modularity)

    provenance = {
        "software": f"uonet {__version__}",
        "rng": RNG_DESCRIPTION,
        "master_seed": config.master_seed,
        "dataset_sha256": dataset_hash(graph),
        "n_users": graph.n_users,
        "n_objects": graph.n_objects,
        "n_edges": graph.n_edges,
        "log_base": config.log_base,
    }
    baseline = {"users": base.users_remaining, "projected_density": base.projected_density,
                "modularity": base.modularity, "communities": base.communities}
    return SweepReport(config, rows, provenance, baseline)


class PlantedBipartite(NamedTuple):
    graph: BipartiteGraph
    user_blocks: dict  # user id -> block index


def make_planted_bipartite(blocks=2, users_per_block=50, objects_per_block=40,
                           popular_objects=3, seed=None, objects_per_user=8,
                           max_weight=5, popular_weight=1.0) -> PlantedBipartite:
    """Synthetic user-object network with planted user groups.

    Each user links to ``objects_per_user`` private objects of its own block
    with integer weights uniform on ``1..max_weight``, and to every one of
    the ``popular_objects`` global objects with weight ``popular_weight``.
    Private subsets are random but balanced: each user takes the least-used
    objects of its block so far, ties broken by a random permutation, so
    private object degrees within a block differ by at most one.

    Users are ``"u<block>_<i>"``, private objects ``"o<block>_<j>"``,
    popular objects ``"pop<j>"``.
    """
    for name, v in (("blocks", blocks), ("users_per_block", users_per_block),
                    ("objects_per_block", objects_per_block),
                    ("objects_per_user", objects_per_user), ("max_weight", max_weight)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1")
    if popular_objects < 0:
        raise ValueError("popular_objects must be >= 0")
    if popular_weight <= 0:
        raise ValueError("popular_weight must be > 0")
    per_user = min(objects_per_user, objects_per_block)
    rng = np.random.default_rng(seed)
    records, truth = [], {}
    for b in range(blocks):
        load = np.zeros(objects_per_block, dtype=np.int64)
        for i in range(users_per_block):
            u = f"u{b}_{i}"
            truth[u] = b
            order = rng.permutation(objects_per_block)
            picks = order[np.argsort(load[order], kind="stable")[:per_user]]
            load[picks] += 1
            weights = rng.integers(1, max_weight + 1, size=per_user)
            for j, w in zip(np.sort(picks).tolist(), weights.tolist()):
                records.append((u, f"o{b}_{j}", float(w)))
            for j in range(popular_objects):
                records.append((u, f"pop{j}", float(popular_weight)))
    return PlantedBipartite(BipartiteGraph.from_edges(records), truth)
