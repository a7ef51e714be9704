"""One-mode projections of bipartite graphs."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import NodeNotFoundError
from .graph import OBJECTS, USERS, BipartiteGraph, ProjectedGraph, _check_side


def incidence_matrix(graph: BipartiteGraph, side=USERS) -> sp.csr_matrix:
    """Binary incidence matrix with rows on ``side``."""
    data = np.ones(graph.n_edges)
    if _check_side(side) == USERS:
        shape = (graph.n_users, graph.n_objects)
        rows, cols = graph.edge_users, graph.edge_objects
    else:
        shape = (graph.n_objects, graph.n_users)
        rows, cols = graph.edge_objects, graph.edge_users
    return sp.csr_matrix((data, (rows, cols)), shape=shape)


def project(graph: BipartiteGraph, side=USERS) -> ProjectedGraph:
    """Project onto ``side``; edge weight = number of shared neighbours.

    Bipartite edge weights are ignored. Every node of the chosen side is kept,
    including nodes left without projected edges.
    """
    B = incidence_matrix(graph, side)
    C = sp.triu(B @ B.T, k=1).tocoo()
    nodes = graph.users if side == USERS else graph.objects
    return ProjectedGraph(nodes, C.row, C.col, C.data, side=side)


def _locate(graph, key, side):
    if side is not None:
        _check_side(side)
        return side, (graph.user_index(key) if side == USERS else graph.object_index(key))
    in_u, in_o = graph.has_user(key), graph.has_object(key)
    if in_u and in_o:
        raise ValueError(f"{key!r} is both a user and an object; pass side=")
    if in_u:
        return USERS, graph.user_index(key)
    if in_o:
        return OBJECTS, graph.object_index(key)
    raise NodeNotFoundError(f"unknown node {key!r}")


def co_neighbor_count(graph: BipartiteGraph, a, b, side=None) -> int:
    """``|N(a) & N(b)|`` for two distinct nodes of the same side."""
    sa, ia = _locate(graph, a, side)
    sb, ib = _locate(graph, b, side)
    if sa != sb:
        raise ValueError(f"{a!r} and {b!r} are on different sides")
    if ia == ib:
        raise ValueError("co_neighbor_count needs two distinct nodes")
    nbrs = graph.user_neighbors if sa == USERS else graph.object_neighbors
    return int(np.intersect1d(nbrs(ia), nbrs(ib), assume_unique=True).size)
