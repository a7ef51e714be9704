"""tf-idf edge reweighting and threshold filtering.

For an edge ``(u, o)``::

    f(u, o)     = w(u, o) / max{w(u, p) : p in N(u)}
    w_new(u, o) = f(u, o) * log(n_u / d(o))

``d(o)`` is the unweighted object degree. The logarithm base defaults to 2;
with base 2 a threshold of 1 keeps exactly the edges to objects reached by at
most half of the users (when f = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import UndefinedMetricError
from .graph import BipartiteGraph, require_nonempty

DEFAULT_LOG_BASE = 2.0


def _log(x, base):
    if base == 2:
        return np.log2(x)
    if base == math.e:
        return np.log(x)
    if base == 10:
        return np.log10(x)
    if not (base > 0 and base != 1):
        raise ValueError(f"invalid logarithm base {base}")
    return np.log(x) / np.log(base)


def _max_normalizer(graph: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    w = graph.original_weights
    user_max = np.zeros(graph.n_users)
    np.maximum.at(user_max, graph.edge_users, w)
    return w / user_max[graph.edge_users], user_max


# Term-frequency strategies: graph -> (per-edge f, per-user normalizer).
NORMALIZERS = {"max": _max_normalizer}


@dataclass(frozen=True)
class TfidfWeights:
    """Per-edge tf-idf components, aligned with the graph's edge order."""

    tf: np.ndarray
    idf_per_edge: np.ndarray
    w_new: np.ndarray
    user_max: np.ndarray
    idf: np.ndarray  # per object; nan for objects without edges
    base: float


def term_frequency(graph: BipartiteGraph, user, obj) -> float:
    """``w(u, o)`` divided by the largest weight on any edge of ``u``."""
    k = graph.edge_id(user, obj)
    i = graph.edge_users[k]
    return float(graph.original_weights[k] / graph.original_weights[graph.user_edges(i)].max())


def inverse_user_frequency(graph: BipartiteGraph, obj, base=DEFAULT_LOG_BASE) -> float:
    """``log(n_u / d(o))``; zero for an object every user touches."""
    d = graph.object_degrees()[graph.object_index(obj)]
    if d == 0:
        raise UndefinedMetricError(f"object {obj!r} has no edges")
    return float(_log(graph.n_users / d, base))


def compute_tfidf(graph: BipartiteGraph, base=DEFAULT_LOG_BASE, normalizer="max") -> TfidfWeights:
    require_nonempty(graph)
    try:
        tf, user_max = NORMALIZERS[normalizer](graph)
    except KeyError:
        raise ValueError(f"unknown normalizer {normalizer!r}") from None
    deg = graph.object_degrees()
    with np.errstate(divide="ignore", invalid="ignore"):
        idf = np.where(deg > 0, _log(graph.n_users / np.maximum(deg, 1), base), np.nan)
    idf_e = idf[graph.edge_objects]
    for a in (tf, user_max, idf, idf_e):
        a.setflags(write=False)
    w_new = tf * idf_e
    w_new.setflags(write=False)
    return TfidfWeights(tf, idf_e, w_new, user_max, idf, float(base))


def tfidf_reweight(graph: BipartiteGraph, base=DEFAULT_LOG_BASE, normalizer="max") -> BipartiteGraph:
    """Return a copy of ``graph`` whose current weights are the tf-idf weights.

    The original weights stay available as ``original_weights``.
    """
    return graph.with_weights(compute_tfidf(graph, base, normalizer).w_new)


class ThresholdReport(NamedTuple):
    tau: float
    edges_removed: int
    edges_remaining: int
    users_remaining: int
    objects_remaining: int
    empty: bool

    @property
    def removed_ratio(self) -> float:
        total = self.edges_removed + self.edges_remaining
        return self.edges_removed / total if total else 0.0


def _check_tau(tau):
    tau = float(tau)
    if not (math.isfinite(tau) and tau >= 0):
        raise ValueError(f"threshold must be finite and >= 0, got {tau}")
    return tau


def filter_with_report(graph: BipartiteGraph, tau) -> tuple[BipartiteGraph, ThresholdReport]:
    """Drop edges with weight strictly below ``tau`` and prune isolated nodes."""
    tau = _check_tau(tau)
    keep = graph.weights >= tau
    out = graph.edge_subgraph(keep)
    report = ThresholdReport(tau, int(graph.n_edges - keep.sum()), out.n_edges,
                             out.n_users, out.n_objects, out.is_empty())
    return out, report


def filter_by_threshold(graph: BipartiteGraph, tau) -> BipartiteGraph:
    """The filtered graph ``G^tau``; expects tf-idf weights as current weights."""
    return filter_with_report(graph, tau)[0]
