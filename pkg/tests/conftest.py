import numpy as np
import pytest
from hypothesis import strategies as st

from uonet import BipartiteGraph, ProjectedGraph

# Five users, six objects. User 1 touches a, b, d; a and b are shared only by
# users 1 and 2; d reaches four of the five users. The remaining edges fill
# in objects c, e, f. Weights stand in for edge thickness.
TOY_EDGES = [
    ("1", "a", 3), ("1", "b", 2), ("1", "d", 1),
    ("2", "a", 2), ("2", "b", 4), ("2", "c", 1), ("2", "d", 1),
    ("3", "c", 2), ("3", "d", 1),
    ("4", "d", 2), ("4", "e", 3),
    ("5", "e", 1), ("5", "f", 5),
]


@pytest.fixture
def toy():
    return BipartiteGraph.from_edges(TOY_EDGES)


@st.composite
def bipartite_graphs(draw, max_users=6, max_objects=6, max_weight=5, min_edges=1):
    """Random weighted bipartite graphs keyed "u<i>" / "o<j>"."""
    pairs = draw(st.sets(st.tuples(st.integers(0, max_users - 1), st.integers(0, max_objects - 1)),
                         min_size=min_edges, max_size=max_users * max_objects))
    pairs = sorted(pairs)
    weights = draw(st.lists(st.integers(1, max_weight), min_size=len(pairs), max_size=len(pairs)))
    return BipartiteGraph.from_edges((f"u{u}", f"o{o}", float(w)) for (u, o), w in zip(pairs, weights))


def random_bipartite(rng, n_users, n_objects, p, max_weight=1):
    recs = [(f"u{i}", f"o{j}", float(rng.integers(1, max_weight + 1)))
            for i in range(n_users) for j in range(n_objects) if rng.random() < p]
    return BipartiteGraph.from_edges(recs)


def random_graph(rng, n, p, max_weight=1):
    """Erdos-Renyi style ProjectedGraph with integer weights; may be edgeless."""
    edges = [(f"n{i}", f"n{j}", float(rng.integers(1, max_weight + 1)))
             for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return ProjectedGraph.from_edges(edges, nodes=[f"n{i}" for i in range(n)])


def set_partitions(n):
    """All set partitions of range(n) as restricted growth strings."""
    if n == 0:
        yield []
        return
    def rec(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for c in range(top + 2):
            prefix.append(c)
            yield from rec(prefix, max(top, c))
            prefix.pop()
    yield from rec([0], 0)


def brute_modularity(graph, labels, weighted=True):
    """Q from the dense adjacency definition (1/2W) sum_ij [A_ij - k_i k_j / 2W] d(c_i, c_j)."""
    n = graph.n_nodes
    A = np.zeros((n, n))
    w = graph.weights if weighted else np.ones(graph.n_edges)
    for a, b, x in zip(graph.src, graph.dst, w):
        A[a, b] += x
        A[b, a] += x
    k = A.sum(axis=1)
    two_w = A.sum()
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    return float(((A - np.outer(k, k) / two_w) * same).sum() / two_w)


# --- acceptance report -------------------------------------------------------------
# Tests marked ``criterion(n, title)`` are collected into one line per
# criterion at the end of the run.

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "status": "PASS", "detail": []})
    if rep.failed:
        entry["status"] = "FAIL"
        entry["detail"].append(f"{item.name} failed")
    elif rep.skipped and entry["status"] != "FAIL":
        entry["status"] = "SKIP"
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
        entry["detail"].append(reason.removeprefix("Skipped: "))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        extra = f"  ({'; '.join(e['detail'])})" if e["detail"] else ""
        terminalreporter.write_line(f"criterion {number}: {e['status']}  {e['title']}{extra}")
