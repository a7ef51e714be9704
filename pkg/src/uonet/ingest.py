"""Reading delimited edge lists and the built-in Southern Women fixture."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyGraphError, ParseError
from .graph import BipartiteGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IngestOptions:
    """How to read an edge-list file.

    ``weight_column=None`` means "third column if present, else unweighted".
    Records whose weight is below ``min_rating`` are dropped before duplicate
    pairs are merged.
    """

    delimiter: str = "\t"
    has_header: bool = False
    weight_column: int | None = None
    min_rating: float | None = None
    user_column: int = 0
    object_column: int = 1
    comment: str = "#"

    def __post_init__(self):
        if len(self.delimiter.encode("utf-8")) != 1:
            raise ValueError("delimiter must be a single byte")
        if self.weight_column is not None and self.weight_column < 0:
            raise ValueError("weight_column must be >= 0")


@dataclass(frozen=True)
class LoadSummary:
    rows_read: int
    rows_dropped: int
    duplicates_merged: int
    n_users: int
    n_objects: int
    n_edges: int

    def as_dict(self):
        return dict(self.__dict__)


def parse_records(lines, options: IngestOptions | None = None, source=None):
    """Parse text lines into ``(user, object, weight)`` tuples.

    Returns ``(records, rows_read, rows_dropped)``. Blank lines and lines
    starting with the comment marker are ignored and not counted.
    """
    opts = options or IngestOptions()
    need = max(opts.user_column, opts.object_column) + 1
    if opts.weight_column is not None:
        need = max(need, opts.weight_column + 1)
    records = []
    rows_read = rows_dropped = 0
    header_pending = opts.has_header
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or (opts.comment and line.startswith(opts.comment)):
            continue
        if header_pending:
            header_pending = False
            continue
        rows_read += 1
        fields = line.split(opts.delimiter)
        if len(fields) < need:
            raise ParseError(f"expected at least {need} columns, got {len(fields)}",
                             line=lineno, path=source)
        user = fields[opts.user_column].strip()
        obj = fields[opts.object_column].strip()
        if not user or not obj:
            raise ParseError("empty user or object key", line=lineno, path=source)
        wcol = opts.weight_column
        if wcol is None and len(fields) > 2:
            wcol = 2
        if wcol is None:
            weight = 1.0
        else:
            try:
                weight = float(fields[wcol])
            except ValueError:
                raise ParseError(f"bad weight {fields[wcol]!r}", line=lineno, path=source) from None
            if not math.isfinite(weight) or weight < 0:
                raise ParseError(f"weight must be finite and >= 0, got {weight}",
                                 line=lineno, path=source)
        if weight == 0 or (opts.min_rating is not None and weight < opts.min_rating):
            rows_dropped += 1
            continue
        records.append((user, obj, weight))
    return records, rows_read, rows_dropped


def read_edge_list(path, options: IngestOptions | None = None):
    """Load an edge list; returns ``(graph, LoadSummary)``."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        records, rows_read, rows_dropped = parse_records(fh, options, source=str(path))
    graph = BipartiteGraph.from_edges(records)
    if graph.is_empty():
        raise EmptyGraphError(f"{path}: no edges left after parsing")
    summary = LoadSummary(rows_read, rows_dropped, len(records) - graph.n_edges,
                          graph.n_users, graph.n_objects, graph.n_edges)
    return graph, summary


def load_edge_list(path, options: IngestOptions | None = None) -> BipartiteGraph:
    """Load a delimited ``user, object[, weight]`` file into a BipartiteGraph.

    Duplicate pairs are merged by summing weights. The load summary is logged
    at INFO level; use :func:`read_edge_list` to get it as a value.
    """
    graph, summary = read_edge_list(path, options)
    log.info("loaded %s: %s", path, summary.as_dict())
    return graph


# Davis, Gardner & Gardner (1941) attendance matrix as usually reprinted
# (e.g. Freeman 2003). Rows are women 1..18, columns events E1..E14.
_DAVIS_ROWS = (
    "11111101100000",
    "11101111000000",
    "01111111100000",
    "10111111000000",
    "00111010000000",
    "00101101000000",
    "00001111000000",
    "00000101100000",
    "00001011100000",
    "00000011100100",
    "00000001110100",
    "00000001110111",
    "00000011110111",
    "00000110111111",
    "00000011011100",
    "00000001100000",
    "00000000101000",
    "00000000101000",
)

SOUTHERN_WOMEN_NAMES = (
    "Evelyn", "Laura", "Theresa", "Brenda", "Charlotte", "Frances",
    "Eleanor", "Pearl", "Ruth", "Verne", "Myra", "Katherine",
    "Sylvia", "Nora", "Helen", "Dorothy", "Olivia", "Flora",
)


def southern_women() -> BipartiteGraph:
    """Davis's Southern Women network: 18 women x 14 events, unit weights.

    Women are identified ``"1"``..``"18"`` (see ``SOUTHERN_WOMEN_NAMES``),
    events ``"E1"``..``"E14"``.
    """
    women = [str(i + 1) for i in range(len(_DAVIS_ROWS))]
    events = [f"E{j + 1}" for j in range(len(_DAVIS_ROWS[0]))]
    eu, eo = [], []
    for i, row in enumerate(_DAVIS_ROWS):
        for j, c in enumerate(row):
            if c == "1":
                eu.append(i)
                eo.append(j)
    return BipartiteGraph(women, events, eu, eo, [1.0] * len(eu))
