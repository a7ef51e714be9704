"""Bipartite user-object graphs and their one-mode projections.

Node identifiers are interned strings; every algorithm works on the dense
integer indices. Edges are kept sorted by ``(user, object)`` index so two
graphs built from the same records compare equal element by element.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptyGraphError, NodeNotFoundError, UndefinedMetricError

USERS = "users"
OBJECTS = "objects"
SIDES = (USERS, OBJECTS)


def _check_side(side):
    if side not in SIDES:
        raise ValueError(f"side must be 'users' or 'objects', got {side!r}")
    return side


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


class BipartiteGraph:
    """Immutable weighted bipartite graph ``G = (U, O, E)``.

    Parameters
    ----------
    users, objects : sequence of str
        Node identifiers in index order. Must be unique within each side.
    edge_users, edge_objects : array_like of int
        Endpoint indices of every edge.
    weights : array_like of float
        Current edge weight (original strength, or tf-idf after reweighting).
        Finite and ``>= 0``.
    original_weights : array_like of float, optional
        Weights before reweighting; defaults to ``weights``.
    """

    __slots__ = (
        "users", "objects", "edge_users", "edge_objects", "weights",
        "original_weights", "_user_lookup", "_object_lookup",
        "_user_ptr", "_object_ptr", "_object_order",
    )

    def __init__(self, users, objects, edge_users, edge_objects, weights,
                 original_weights=None):
        self.users = tuple(users)
        self.objects = tuple(objects)
        self._user_lookup = {k: i for i, k in enumerate(self.users)}
        self._object_lookup = {k: i for i, k in enumerate(self.objects)}
        if len(self._user_lookup) != len(self.users):
            raise ValueError("duplicate user identifiers")
        if len(self._object_lookup) != len(self.objects):
            raise ValueError("duplicate object identifiers")

        eu = np.asarray(edge_users, dtype=np.int64).reshape(-1)
        eo = np.asarray(edge_objects, dtype=np.int64).reshape(-1)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        w0 = w if original_weights is None else np.asarray(original_weights, dtype=np.float64).reshape(-1)
        if not (len(eu) == len(eo) == len(w) == len(w0)):
            raise ValueError("edge arrays must have equal length")
        if len(eu):
            if eu.min() < 0 or eu.max() >= len(self.users):
                raise ValueError("user index out of range")
            if eo.min() < 0 or eo.max() >= len(self.objects):
                raise ValueError("object index out of range")
        if not (np.all(np.isfinite(w)) and np.all(w >= 0)):
            raise ValueError("edge weights must be finite and nonnegative")

        order = np.lexsort((eo, eu))
        eu, eo, w, w0 = eu[order], eo[order], w[order], w0[order]
        if len(eu) > 1 and np.any((eu[1:] == eu[:-1]) & (eo[1:] == eo[:-1])):
            raise ValueError("duplicate (user, object) edge")

        self.edge_users = _frozen(eu, np.int64)
        self.edge_objects = _frozen(eo, np.int64)
        self.weights = _frozen(w, np.float64)
        self.original_weights = _frozen(w0, np.float64)

        ptr = np.zeros(len(self.users) + 1, dtype=np.int64)
        np.cumsum(np.bincount(eu, minlength=len(self.users)), out=ptr[1:])
        self._user_ptr = ptr
        self._object_order = np.lexsort((eu, eo))
        optr = np.zeros(len(self.objects) + 1, dtype=np.int64)
        np.cumsum(np.bincount(eo, minlength=len(self.objects)), out=optr[1:])
        self._object_ptr = optr

    @classmethod
    def from_edges(cls, records: Iterable[Sequence]) -> "BipartiteGraph":
        """Build a graph from ``(user, object[, weight])`` records.

        Keys are interned by first appearance. Repeated pairs are merged by
        summing their weights; a missing weight counts as 1.0.
        """
        users, objects = {}, {}
        acc = {}
        for rec in records:
            if len(rec) == 2:
                u, o = rec
                w = 1.0
            else:
                u, o, w = rec[0], rec[1], float(rec[2])
            if not (np.isfinite(w) and w > 0):
                raise ValueError(f"edge ({u!r}, {o!r}) has non-positive weight {w}")
            ui = users.setdefault(u, len(users))
            oi = objects.setdefault(o, len(objects))
            acc[ui, oi] = acc.get((ui, oi), 0.0) + w
        if acc:
            keys = np.array(list(acc.keys()), dtype=np.int64)
            vals = np.fromiter(acc.values(), dtype=np.float64, count=len(acc))
        else:
            keys = np.empty((0, 2), dtype=np.int64)
            vals = np.empty(0)
        return cls(users, objects, keys[:, 0], keys[:, 1], vals)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_edges(self) -> int:
        return len(self.edge_users)

    def is_empty(self) -> bool:
        return self.n_edges == 0

    def user_index(self, key) -> int:
        try:
            return self._user_lookup[key]
        except KeyError:
            raise NodeNotFoundError(f"unknown user {key!r}") from None

    def object_index(self, key) -> int:
        try:
            return self._object_lookup[key]
        except KeyError:
            raise NodeNotFoundError(f"unknown object {key!r}") from None

    def has_user(self, key) -> bool:
        return key in self._user_lookup

    def has_object(self, key) -> bool:
        return key in self._object_lookup

    def user_degrees(self) -> np.ndarray:
        return np.diff(self._user_ptr)

    def object_degrees(self) -> np.ndarray:
        return np.diff(self._object_ptr)

    def user_edges(self, i: int) -> np.ndarray:
        """Edge ids incident to user ``i`` (sorted by object index)."""
        return np.arange(self._user_ptr[i], self._user_ptr[i + 1])

    def object_edges(self, j: int) -> np.ndarray:
        """Edge ids incident to object ``j`` (sorted by user index)."""
        return self._object_order[self._object_ptr[j]:self._object_ptr[j + 1]]

    def user_neighbors(self, i: int) -> np.ndarray:
        return self.edge_objects[self.user_edges(i)]

    def object_neighbors(self, j: int) -> np.ndarray:
        return self.edge_users[self.object_edges(j)]

    def edge_id(self, user, obj) -> int:
        """Edge id for the pair of keys; raises NodeNotFoundError if absent."""
        i, j = self.user_index(user), self.object_index(obj)
        lo, hi = self._user_ptr[i], self._user_ptr[i + 1]
        k = lo + np.searchsorted(self.edge_objects[lo:hi], j)
        if k < hi and self.edge_objects[k] == j:
            return int(k)
        raise NodeNotFoundError(f"no edge between {user!r} and {obj!r}")

    def edges(self):
        """Yield ``(user, object, weight)`` in canonical order."""
        for u, o, w in zip(self.edge_users, self.edge_objects, self.weights):
            yield self.users[u], self.objects[o], float(w)

    def with_weights(self, weights) -> "BipartiteGraph":
        """Same structure, new current weights; original weights carried over."""
        return BipartiteGraph(self.users, self.objects, self.edge_users,
                              self.edge_objects, weights, self.original_weights)

    def edge_subgraph(self, keep) -> "BipartiteGraph":
        """Keep the edges selected by boolean mask ``keep``, then drop isolated nodes.

        Surviving nodes keep their relative order.
        """
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != (self.n_edges,):
            raise ValueError("mask length must equal the number of edges")
        eu, eo = self.edge_users[keep], self.edge_objects[keep]
        u_alive = np.zeros(self.n_users, dtype=bool)
        o_alive = np.zeros(self.n_objects, dtype=bool)
        u_alive[eu] = True
        o_alive[eo] = True
        u_map = np.cumsum(u_alive) - 1
        o_map = np.cumsum(o_alive) - 1
        users = [k for k, a in zip(self.users, u_alive) if a]
        objects = [k for k, a in zip(self.objects, o_alive) if a]
        return BipartiteGraph(users, objects, u_map[eu], o_map[eo],
                              self.weights[keep], self.original_weights[keep])

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.users == other.users and self.objects == other.objects
                and np.array_equal(self.edge_users, other.edge_users)
                and np.array_equal(self.edge_objects, other.edge_objects)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.original_weights, other.original_weights))

    __hash__ = None

    def __repr__(self):
        return (f"BipartiteGraph(n_users={self.n_users}, n_objects={self.n_objects}, "
                f"n_edges={self.n_edges})")


class ProjectedGraph:
    """Undirected weighted one-mode graph without self-loops.

    Edges are stored once with ``src < dst``; ``side`` records which side of
    the bipartite graph the nodes came from (``None`` for arbitrary graphs).
    """

    __slots__ = ("nodes", "side", "src", "dst", "weights", "_lookup")

    def __init__(self, nodes, src, dst, weights, side=None):
        self.nodes = tuple(nodes)
        self.side = side
        self._lookup = {k: i for i, k in enumerate(self.nodes)}
        if len(self._lookup) != len(self.nodes):
            raise ValueError("duplicate node identifiers")
        a = np.asarray(src, dtype=np.int64).reshape(-1)
        b = np.asarray(dst, dtype=np.int64).reshape(-1)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if not (len(a) == len(b) == len(w)):
            raise ValueError("edge arrays must have equal length")
        if np.any(a == b):
            raise ValueError("self-loops are not allowed")
        if len(a) and (min(a.min(), b.min()) < 0 or max(a.max(), b.max()) >= len(self.nodes)):
            raise ValueError("node index out of range")
        if not np.all(np.isfinite(w) & (w > 0)):
            raise ValueError("projected edge weights must be positive")
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise ValueError("parallel edges are not allowed")
        self.src = _frozen(lo, np.int64)
        self.dst = _frozen(hi, np.int64)
        self.weights = _frozen(w, np.float64)

    @classmethod
    def from_edges(cls, edges, nodes=None, side=None) -> "ProjectedGraph":
        """Build from ``(a, b[, weight])`` records keyed by identifier.

        ``nodes`` fixes the node order and may include isolated nodes;
        otherwise nodes are interned by first appearance.
        """
        lookup = {} if nodes is None else {k: i for i, k in enumerate(nodes)}
        fixed = nodes is not None
        src, dst, w = [], [], []
        for rec in edges:
            a, b = rec[0], rec[1]
            for k in (a, b):
                if k not in lookup:
                    if fixed:
                        raise NodeNotFoundError(f"unknown node {k!r}")
                    lookup[k] = len(lookup)
            src.append(lookup[a])
            dst.append(lookup[b])
            w.append(float(rec[2]) if len(rec) > 2 else 1.0)
        return cls(list(lookup), src, dst, w, side=side)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def index(self, key) -> int:
        try:
            return self._lookup[key]
        except KeyError:
            raise NodeNotFoundError(f"unknown node {key!r}") from None

    def strengths(self, weighted=True) -> np.ndarray:
        """Weighted degree of every node (plain degree if ``weighted`` is false)."""
        w = self.weights if weighted else np.ones(self.n_edges)
        n = self.n_nodes
        return np.bincount(self.src, w, minlength=n) + np.bincount(self.dst, w, minlength=n)

    def edges(self):
        for a, b, w in zip(self.src, self.dst, self.weights):
            yield self.nodes[a], self.nodes[b], float(w)

    def __eq__(self, other):
        if not isinstance(other, ProjectedGraph):
            return NotImplemented
        return (self.nodes == other.nodes and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    def __repr__(self):
        return f"ProjectedGraph(side={self.side!r}, n_nodes={self.n_nodes}, n_edges={self.n_edges})"


class TopObject(NamedTuple):
    object: str
    degree: int
    fraction: float


def degree(graph: BipartiteGraph, node, side=None) -> int:
    """Unweighted number of edges incident to ``node``.

    With ``side=None`` the key is looked up among users first, then objects;
    a key present on both sides must be disambiguated with ``side``.
    """
    if side is None:
        in_u, in_o = graph.has_user(node), graph.has_object(node)
        if in_u and in_o:
            raise ValueError(f"{node!r} is both a user and an object; pass side=")
        if not (in_u or in_o):
            raise NodeNotFoundError(f"unknown node {node!r}")
        side = USERS if in_u else OBJECTS
    if _check_side(side) == USERS:
        return int(graph.user_degrees()[graph.user_index(node)])
    return int(graph.object_degrees()[graph.object_index(node)])


def density(graph: BipartiteGraph) -> float:
    """``m / (n_u * n_o)``."""
    if graph.n_users == 0 or graph.n_objects == 0:
        raise UndefinedMetricError("density is undefined when a side is empty")
    return graph.n_edges / (graph.n_users * graph.n_objects)


def projected_density(graph: ProjectedGraph) -> float:
    """``2 m / (n (n - 1))`` for a one-mode graph."""
    n = graph.n_nodes
    if n < 2:
        raise UndefinedMetricError("projected density needs at least two nodes")
    return 2.0 * graph.n_edges / (n * (n - 1))


def average_degrees(graph: BipartiteGraph) -> tuple[float, float]:
    """Mean user degree and mean object degree."""
    if graph.n_users == 0 or graph.n_objects == 0:
        raise UndefinedMetricError("average degree is undefined when a side is empty")
    return graph.n_edges / graph.n_users, graph.n_edges / graph.n_objects


def top_objects(graph: BipartiteGraph, k: int) -> list[TopObject]:
    """The ``k`` highest-degree objects with the fraction of users each reaches.

    Ties are broken by identifier.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    deg = graph.object_degrees()
    ranked = sorted(range(graph.n_objects), key=lambda j: (-deg[j], graph.objects[j]))
    return [TopObject(graph.objects[j], int(deg[j]), deg[j] / graph.n_users)
            for j in ranked[:k]]


def degree_sequence(graph: BipartiteGraph, side: str) -> list[int]:
    """Degrees of one side in node-index order."""
    if _check_side(side) == USERS:
        return graph.user_degrees().tolist()
    return graph.object_degrees().tolist()


def require_nonempty(graph: BipartiteGraph):
    if graph.is_empty():
        raise EmptyGraphError("graph has no edges")
