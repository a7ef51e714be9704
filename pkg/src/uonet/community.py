"""Modularity and Louvain community detection on one-mode graphs."""
from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .errors import InvalidPartitionError, UndefinedMetricError
from .graph import ProjectedGraph

IMPROVEMENT_TOL = 1e-7
DEFAULT_RESTARTS = 10


class Partition:
    """Assignment of graph nodes to communities ``0..community_count-1``.

    Community ids are dense and numbered by first appearance in ``nodes``.
    ``modularity`` and ``levels`` are filled in by :func:`louvain`.
    """

    __slots__ = ("nodes", "membership", "modularity", "levels")

    def __init__(self, nodes, membership, modularity=None, levels=0):
        nodes = tuple(nodes)
        labels = list(membership)
        if len(labels) != len(nodes):
            raise InvalidPartitionError("membership length differs from node count")
        dense = {}
        out = np.fromiter((dense.setdefault(c, len(dense)) for c in labels),
                          dtype=np.int64, count=len(labels))
        out.setflags(write=False)
        self.nodes = nodes
        self.membership = out
        self.modularity = modularity
        self.levels = levels

    @classmethod
    def from_mapping(cls, nodes, mapping: Mapping):
        missing = [k for k in nodes if k not in mapping]
        if missing:
            raise InvalidPartitionError(f"partition does not cover nodes {missing[:5]!r}")
        return cls(nodes, [mapping[k] for k in nodes])

    @property
    def community_count(self) -> int:
        return int(self.membership.max()) + 1 if len(self.membership) else 0

    def communities(self) -> list[list]:
        groups = [[] for _ in range(self.community_count)]
        for k, c in zip(self.nodes, self.membership):
            groups[c].append(k)
        return groups

    def as_dict(self) -> dict:
        return {k: int(c) for k, c in zip(self.nodes, self.membership)}

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.nodes == other.nodes and np.array_equal(self.membership, other.membership)

    __hash__ = None

    def __repr__(self):
        return (f"Partition(n_nodes={len(self.nodes)}, communities={self.community_count}, "
                f"modularity={self.modularity})")


def _membership_for(graph: ProjectedGraph, partition) -> np.ndarray:
    if isinstance(partition, Partition):
        if partition.nodes == graph.nodes:
            return partition.membership
        partition = partition.as_dict()
    if isinstance(partition, Mapping):
        return Partition.from_mapping(graph.nodes, partition).membership
    labels = np.asarray(partition)
    if labels.shape != (graph.n_nodes,):
        raise InvalidPartitionError("membership length differs from node count")
    return Partition(graph.nodes, labels.tolist()).membership


def modularity(graph: ProjectedGraph, partition, weighted=True) -> float:
    """Newman modularity of ``partition`` on ``graph``.

    ``partition`` may be a :class:`Partition`, a node -> label mapping or a
    label array aligned with ``graph.nodes``. Uses weighted degrees unless
    ``weighted`` is false.
    """
    memb = _membership_for(graph, partition)
    w = graph.weights if weighted else np.ones(graph.n_edges)
    total = w.sum()
    if total <= 0:
        raise UndefinedMetricError("modularity is undefined on a graph without edges")
    size = int(memb.max()) + 1 if len(memb) else 0
    same = memb[graph.src] == memb[graph.dst]
    internal = np.bincount(memb[graph.src][same], w[same], minlength=size)
    strength = graph.strengths(weighted)
    tot = np.bincount(memb, strength, minlength=size)
    return float(np.sum(internal / total - (tot / (2.0 * total)) ** 2))


def _one_level(nbrs, loops, strength, two_w, order_rng):
    """Local moving phase. Returns (community per node, moved?)."""
    n = len(nbrs)
    comm = list(range(n))
    tot = list(strength)
    active = [i for i in range(n) if strength[i] > 0]
    moved_any = False
    cur_q = _level_quality(nbrs, loops, comm, tot, two_w)
    while True:
        moved = False
        for i in order_rng.permutation(active).tolist():
            ci = comm[i]
            ki = strength[i]
            links = {}
            for j, w in nbrs[i]:
                c = comm[j]
                links[c] = links.get(c, 0.0) + w
            tot[ci] -= ki
            best_c = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / two_w
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / two_w
                if gain > best_gain:
                    best_c, best_gain = c, gain
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved = True
        if not moved:
            break
        moved_any = True
        new_q = _level_quality(nbrs, loops, comm, tot, two_w)
        if new_q - cur_q < IMPROVEMENT_TOL:
            break
        cur_q = new_q
    return comm, moved_any


def _level_quality(nbrs, loops, comm, tot, two_w):
    inside = 0.0
    for i, adj in enumerate(nbrs):
        ci = comm[i]
        inside += loops[i]
        for j, w in adj:
            if comm[j] == ci:
                inside += w
    sq = sum(t * t for t in tot)
    return inside / two_w - sq / (two_w * two_w)


def _aggregate(nbrs, loops, comm):
    relabel = {}
    for c in comm:
        relabel.setdefault(c, len(relabel))
    k = len(relabel)
    new_loops = [0.0] * k
    acc = [dict() for _ in range(k)]
    for i, adj in enumerate(nbrs):
        ci = relabel[comm[i]]
        new_loops[ci] += loops[i]
        for j, w in adj:
            cj = relabel[comm[j]]
            if cj == ci:
                new_loops[ci] += w
            else:
                acc[ci][cj] = acc[ci].get(cj, 0.0) + w
    new_nbrs = [sorted(d.items()) for d in acc]
    return new_nbrs, new_loops, [relabel[c] for c in comm]


def louvain(graph: ProjectedGraph, seed=None, use_weights=True,
            restarts=DEFAULT_RESTARTS) -> Partition:
    """Louvain modularity optimisation (resolution 1).

    Nodes are first put in identifier order, then visited in a fresh random
    permutation on every pass. A node only leaves its community for a
    strictly better one; among equally good targets the lowest community id
    wins. Results depend only on the labelled edge set and ``seed``, not on
    node order or isolated nodes.

    A single Louvain run can stall in a poor local optimum for an unlucky
    visiting order, even on graphs with a handful of nodes. The algorithm is
    therefore run ``restarts`` times with independent orders spawned from
    ``seed`` and the partition with the highest modularity is returned
    (the earliest run wins ties).
    """
    if int(restarts) < 1:
        raise ValueError("restarts must be >= 1")
    children = np.random.SeedSequence(seed).spawn(int(restarts))
    best = None
    for child in children:
        part = _louvain_once(graph, np.random.default_rng(child), use_weights)
        if part.modularity is None:
            return part
        if best is None or part.modularity > best.modularity:
            best = part
    return best


def _louvain_once(graph: ProjectedGraph, rng, use_weights) -> Partition:
    n = graph.n_nodes
    canon = sorted(range(n), key=lambda i: str(graph.nodes[i]))
    pos = np.empty(n, dtype=np.int64)
    pos[canon] = np.arange(n)

    w = graph.weights if use_weights else np.ones(graph.n_edges)
    nbrs = [[] for _ in range(n)]
    for a, b, x in zip(pos[graph.src].tolist(), pos[graph.dst].tolist(), w.tolist()):
        nbrs[a].append((b, x))
        nbrs[b].append((a, x))
    for adj in nbrs:
        adj.sort()
    loops = [0.0] * n
    two_w = 2.0 * float(w.sum())
    if two_w <= 0:
        return Partition(graph.nodes, range(n), modularity=None, levels=0)

    node_comm = list(range(n))  # canonical node -> current top-level community
    q = _level_quality(nbrs, loops, list(range(n)),
                       [sum(x for _, x in adj) for adj in nbrs], two_w)
    levels = 0
    while True:
        strength = [loops[i] + sum(x for _, x in adj) for i, adj in enumerate(nbrs)]
        comm, moved = _one_level(nbrs, loops, strength, two_w, rng)
        if not moved:
            break
        new_nbrs, new_loops, relabelled = _aggregate(nbrs, loops, comm)
        new_q = _level_quality(new_nbrs, new_loops, list(range(len(new_nbrs))),
                               [new_loops[i] + sum(x for _, x in adj)
                                for i, adj in enumerate(new_nbrs)], two_w)
        if new_q <= q:
            break
        node_comm = [relabelled[c] for c in node_comm]
        nbrs, loops = new_nbrs, new_loops
        levels += 1
        improved = new_q - q
        q = new_q
        if improved <= IMPROVEMENT_TOL:
            break

    membership = [node_comm[pos[i]] for i in range(n)]
    part = Partition(graph.nodes, membership, levels=levels)
    part.modularity = modularity(graph, part, weighted=use_weights)
    return part
