"""Plain-text dumps passed between CLI stages.

Every dump is tab separated and starts with a tag line naming its layout:

``#uonet-bipartite``
    ``user  object  weight  original_weight`` (the filtered network)
``#uonet-tfidf``
    ``user  object  w_old  f  idf  w_new``
``#uonet-projection``
    ``node  node  weight``; a line holding a single node declares a node
    without projected edges
``#uonet-partition``
    ``node  community``

Floats are written with ``repr`` so a dump reads back bit for bit. Files
without a tag line are raw edge lists and go through :mod:`uonet.ingest`.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError
from .graph import BipartiteGraph, ProjectedGraph
from .ingest import IngestOptions, read_edge_list

BIPARTITE_TAG = "#uonet-bipartite"
TFIDF_TAG = "#uonet-tfidf"
PROJECTION_TAG = "#uonet-projection"
PARTITION_TAG = "#uonet-partition"


def _fmt(x) -> str:
    return repr(float(x))


def write_bipartite(graph: BipartiteGraph, fh):
    fh.write(f"{BIPARTITE_TAG}\tuser\tobject\tweight\toriginal_weight\n")
    for u, o, w, w0 in zip(graph.edge_users.tolist(), graph.edge_objects.tolist(),
                           graph.weights.tolist(), graph.original_weights.tolist()):
        fh.write(f"{graph.users[u]}\t{graph.objects[o]}\t{_fmt(w)}\t{_fmt(w0)}\n")


def write_tfidf(graph: BipartiteGraph, tfidf, fh):
    """Dump a :class:`~uonet.weighting.TfidfWeights` next to its graph's edges."""
    fh.write(f"{TFIDF_TAG}\tuser\tobject\tw_old\tf\tidf\tw_new\n")
    cols = zip(graph.edge_users.tolist(), graph.edge_objects.tolist(),
               graph.original_weights.tolist(), tfidf.tf.tolist(),
               tfidf.idf_per_edge.tolist(), tfidf.w_new.tolist())
    for u, o, w0, f, idf, w in cols:
        fh.write(f"{graph.users[u]}\t{graph.objects[o]}\t{_fmt(w0)}\t{_fmt(f)}\t"
                 f"{_fmt(idf)}\t{_fmt(w)}\n")


def write_projection(proj: ProjectedGraph, fh):
    fh.write(f"{PROJECTION_TAG}\tnode\tnode\tweight\n")
    linked = np.zeros(proj.n_nodes, dtype=bool)
    linked[proj.src] = True
    linked[proj.dst] = True
    for i in np.flatnonzero(~linked).tolist():
        fh.write(f"{proj.nodes[i]}\n")
    for a, b, w in zip(proj.src.tolist(), proj.dst.tolist(), proj.weights.tolist()):
        fh.write(f"{proj.nodes[a]}\t{proj.nodes[b]}\t{_fmt(w)}\n")


def write_partition(part, fh):
    fh.write(f"{PARTITION_TAG}\tnode\tcommunity\n")
    for k, c in zip(part.nodes, part.membership.tolist()):
        fh.write(f"{k}\t{c}\n")


def _tag(path) -> str | None:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    return first.split("\t", 1)[0].strip() if first.startswith("#uonet-") else None


def _rows(path, expect):
    """Yield ``(lineno, fields)`` for the body of a tagged dump."""
    with open(path, encoding="utf-8") as fh:
        next(fh, None)
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in expect:
                raise ParseError(f"expected {' or '.join(map(str, expect))} fields, "
                                 f"got {len(fields)}", line=lineno, path=str(path))
            yield lineno, fields


def _float(s, lineno, path):
    try:
        return float(s)
    except ValueError:
        raise ParseError(f"bad number {s!r}", line=lineno, path=str(path)) from None


def _read_weighted_dump(path, w_col, w0_col, n_fields):
    users, objects = {}, {}
    eu, eo, w, w0 = [], [], [], []
    seen = set()
    for lineno, f in _rows(path, (n_fields,)):
        ui = users.setdefault(f[0], len(users))
        oi = objects.setdefault(f[1], len(objects))
        if (ui, oi) in seen:
            raise ParseError(f"duplicate edge {f[0]!r} - {f[1]!r}", line=lineno, path=str(path))
        seen.add((ui, oi))
        eu.append(ui)
        eo.append(oi)
        w.append(_float(f[w_col], lineno, path))
        w0.append(_float(f[w0_col], lineno, path))
    try:
        return BipartiteGraph(list(users), list(objects), eu, eo, w, w0)
    except ValueError as exc:
        raise ParseError(str(exc), path=str(path)) from None


def read_bipartite(path, options: IngestOptions | None = None) -> BipartiteGraph:
    """Read a raw edge list, a bipartite dump or a tf-idf dump.

    For a tf-idf dump the current weight is ``w_new`` and ``w_old`` is kept
    as the original weight. ``options`` only apply to raw edge lists.
    """
    path = Path(path)
    tag = _tag(path)
    if tag == BIPARTITE_TAG:
        return _read_weighted_dump(path, 2, 3, 4)
    if tag == TFIDF_TAG:
        return _read_weighted_dump(path, 5, 2, 6)
    if tag is not None:
        raise ParseError(f"expected an edge list, got a {tag[1:]} dump", line=1, path=str(path))
    graph, _ = read_edge_list(path, options)
    return graph


def read_projection(path) -> ProjectedGraph:
    path = Path(path)
    if _tag(path) != PROJECTION_TAG:
        raise ParseError(f"missing {PROJECTION_TAG} tag line", line=1, path=str(path))
    nodes, edges = {}, []
    for lineno, f in _rows(path, (1, 3)):
        for k in f[:2] if len(f) == 3 else f:
            nodes.setdefault(k, len(nodes))
        if len(f) == 3:
            edges.append((f[0], f[1], _float(f[2], lineno, path)))
    try:
        return ProjectedGraph.from_edges(edges, nodes=list(nodes))
    except ValueError as exc:
        raise ParseError(str(exc), path=str(path)) from None


def read_partition(path) -> dict:
    path = Path(path)
    if _tag(path) != PARTITION_TAG:
        raise ParseError(f"missing {PARTITION_TAG} tag line", line=1, path=str(path))
    out = {}
    for lineno, (k, c) in _rows(path, (2,)):
        try:
            out[k] = int(c)
        except ValueError:
            raise ParseError(f"bad community id {c!r}", line=lineno, path=str(path)) from None
    return out
