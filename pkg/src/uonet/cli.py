"""Command-line front end: ``uonet <subcommand> ...``.

Exit status is 0 on success, 1 for usage errors, 2 for input errors
(missing files, malformed rows, empty inputs) and 3 for computation errors.
Failures print one line ``uonet-error: <category>: <message>`` on stderr.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import secrets
import sys
from pathlib import Path

from . import __version__
from .community import DEFAULT_RESTARTS, louvain
from .distfit import DEFAULT_SIGNIFICANCE, MIN_TAIL, best_fit
from .errors import UonetError
from .experiment import SweepConfig, config_keys, make_planted_bipartite, run_sweep
from .graph import (OBJECTS, USERS, average_degrees, degree_sequence, density,
                    projected_density, top_objects)
from .ingest import IngestOptions, southern_women
from .projection import project
from .textio import (read_bipartite, read_projection, write_bipartite, write_partition,
                     write_projection, write_tfidf)
from .weighting import DEFAULT_LOG_BASE, compute_tfidf, filter_by_threshold, tfidf_reweight

log = logging.getLogger("uonet")

LOG_LEVEL_ENV = "UONET_LOG_LEVEL"
EXIT_USAGE, EXIT_INPUT, EXIT_COMPUTE = 1, 2, 3
BUILTINS = ("builtin:southern-women", "builtin:planted")


class CliError(Exception):
    def __init__(self, category, message):
        super().__init__(message)
        self.category = category


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", f"{self.prog}: {message}")


def _nonneg_float(s):
    v = float(s)
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a finite number >= 0, got {s}")
    return v


def _pos_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {s}")
    return v


def _seed(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return v


def _delimiter(s):
    s = {"\\t": "\t", "tab": "\t", "comma": ",", "space": " "}.get(s, s)
    if len(s.encode("utf-8")) != 1:
        raise argparse.ArgumentTypeError("delimiter must be a single byte")
    return s


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=_seed, help="seed for all randomness; printed when omitted")
    g.add_argument("--log-level", default=None,
                   help=f"logging level (default from ${LOG_LEVEL_ENV}, else WARNING)")
    g.add_argument("--delimiter", type=_delimiter, default="\t",
                   help="field separator of raw edge lists (default: tab)")
    g.add_argument("--header", action="store_true", help="raw edge list has a header row")
    g.add_argument("--min-rating", type=float, default=None,
                   help="drop raw records whose weight is below this value")
    g.add_argument("-o", "--output", default=None, help="output file (default: stdout)")

    p = _Parser(prog="uonet", description="Analysis of bipartite user-object networks.")
    p.add_argument("--version", action="version", version=f"uonet {__version__}")
    sub = p.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_, input_=True):
        sp = sub.add_parser(name, help=help_, description=help_, parents=[common])
        if input_:
            sp.add_argument("input", help="edge list, dump file, or one of " + ", ".join(BUILTINS))
        return sp

    sp = add("stats", "Size, mean degrees and density of a bipartite network.")
    sp.add_argument("--projections", action="store_true",
                    help="also report edges and density of both one-mode projections")
    sp.add_argument("--json", action="store_true", help="emit JSON instead of TSV")

    sp = add("top-objects", "Highest-degree objects and the share of users they reach.")
    sp.add_argument("-k", type=_pos_int, default=10)

    sp = add("fit-degrees", "Fit candidate distributions to a degree sequence.")
    sp.add_argument("--side", choices=(USERS, OBJECTS), default=USERS)
    sp.add_argument("--significance", type=float, default=DEFAULT_SIGNIFICANCE)
    sp.add_argument("--min-tail", type=_pos_int, default=MIN_TAIL)
    sp.add_argument("--json", action="store_true", help="emit the full FitResult as JSON")

    sp = add("tfidf", "Dump per-edge tf-idf components (user, object, w_old, f, idf, w_new).")
    sp.add_argument("--log-base", type=float, default=DEFAULT_LOG_BASE)

    sp = add("filter", "Keep edges with weight >= tau and prune isolated nodes.")
    sp.add_argument("--tau", type=_nonneg_float, required=True)

    sp = add("project", "One-mode projection weighted by shared neighbours.")
    sp.add_argument("--side", choices=(USERS, OBJECTS), default=USERS)

    sp = add("communities", "Louvain partition of a projection dump; Q goes to stderr.")
    sp.add_argument("--unweighted", action="store_true", help="ignore projected edge weights")
    sp.add_argument("--restarts", type=_pos_int, default=DEFAULT_RESTARTS,
                    help="independent Louvain runs; the best partition is kept")

    sp = add("experiment", "Real-vs-random threshold sweep.", input_=False)
    sp.add_argument("input", nargs="?", default=None,
                    help="network to sweep (overrides 'input' in the config file)")
    sp.add_argument("--config", default=None, help="key = value file mirroring SweepConfig")
    sp.add_argument("--replicates", type=_pos_int, default=None)
    sp.add_argument("--jobs", type=_pos_int, default=None, help="worker processes")

    sp = add("southern-women",
             "tf-idf, filter, user projection and Louvain on the Southern Women network.",
             input_=False)
    sp.add_argument("--tau", type=_nonneg_float, default=1.0)
    sp.add_argument("--log-base", type=float, default=DEFAULT_LOG_BASE)
    return p


def _configure_logging(level):
    level = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise CliError("usage", f"unknown log level {level!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr, force=True)


def _resolve_seed(args, err):
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(63)
    print(f"seed={seed}", file=err)
    return seed


def _ingest_options(args):
    return IngestOptions(delimiter=args.delimiter, has_header=args.header,
                         min_rating=args.min_rating)


def _load(args, source=None):
    source = source if source is not None else args.input
    if source == "builtin:southern-women":
        return southern_women()
    if source == "builtin:planted":
        return make_planted_bipartite(seed=0).graph
    try:
        g = read_bipartite(source, _ingest_options(args))
    except (OSError, UnicodeDecodeError, UonetError, ValueError) as exc:
        raise CliError("input", str(exc)) from None
    if g.is_empty():
        raise CliError("input", f"{source}: no edges")
    return g


@contextlib.contextmanager
def _out(args, out):
    if args.output is None:
        yield out
    else:
        try:
            fh = open(args.output, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise CliError("input", str(exc)) from None
        with fh:
            yield fh


def _fmt(x):
    return "" if x is None else repr(float(x))


def cmd_stats(args, out, err):
    g = _load(args)
    ku, ko = average_degrees(g)
    row = {"n_users": g.n_users, "n_objects": g.n_objects, "n_edges": g.n_edges,
           "mean_user_degree": ku, "mean_object_degree": ko, "density": density(g)}
    if args.projections:
        for side, tag in ((USERS, "users"), (OBJECTS, "objects")):
            pg = project(g, side)
            row[f"projected_{tag}_edges"] = pg.n_edges
            row[f"projected_{tag}_density"] = projected_density(pg) if pg.n_nodes > 1 else None
    with _out(args, out) as fh:
        if args.json:
            fh.write(json.dumps(row, indent=2) + "\n")
        else:
            fh.write("\t".join(row) + "\n")
            fh.write("\t".join(str(v) if isinstance(v, int) else _fmt(v)
                               for v in row.values()) + "\n")


def cmd_top_objects(args, out, err):
    g = _load(args)
    with _out(args, out) as fh:
        fh.write("object\tdegree\tfraction\n")
        for t in top_objects(g, args.k):
            fh.write(f"{t.object}\t{t.degree}\t{_fmt(t.fraction)}\n")


def cmd_fit_degrees(args, out, err):
    g = _load(args)
    degs = [d for d in degree_sequence(g, args.side) if d > 0]
    res = best_fit(degs, significance=args.significance, min_tail=args.min_tail)
    with _out(args, out) as fh:
        if args.json:
            fh.write(json.dumps(res.as_dict(), indent=2, sort_keys=True) + "\n")
            return
        fh.write("model\txmin\tloglikelihood\tparameters\n")
        for kind, m in res.models.items():
            params = " ".join(f"{k}={v:.6g}" for k, v in m.params.items())
            fh.write(f"{kind}\t{m.xmin}\t{m.loglikelihood:.6f}\t{params}\n")
        fh.write("\nmodel_a\tmodel_b\tR\tp\n")
        for c in res.comparisons:
            fh.write(f"{c.a}\t{c.b}\t{c.R:.6f}\t{c.p:.6g}\n")
        tag = " (inconclusive)" if res.inconclusive else ""
        fh.write(f"\nbest\t{res.best}{tag}\n")


def cmd_tfidf(args, out, err):
    g = _load(args)
    tw = compute_tfidf(g, base=args.log_base)
    with _out(args, out) as fh:
        write_tfidf(g, tw, fh)


def cmd_filter(args, out, err):
    g = _load(args)
    f = filter_by_threshold(g, args.tau)
    log.info("tau=%g kept %d of %d edges", args.tau, f.n_edges, g.n_edges)
    with _out(args, out) as fh:
        write_bipartite(f, fh)


def cmd_project(args, out, err):
    g = _load(args)
    with _out(args, out) as fh:
        write_projection(project(g, args.side), fh)


def cmd_communities(args, out, err):
    # Validate the seed before touching the input file.
    seed = _resolve_seed(args, err)
    try:
        pg = read_projection(args.input)
    except (OSError, UnicodeDecodeError, UonetError, ValueError) as exc:
        raise CliError("input", str(exc)) from None
    part = louvain(pg, seed=seed, use_weights=not args.unweighted, restarts=args.restarts)
    with _out(args, out) as fh:
        write_partition(part, fh)
    print(f"modularity={_fmt(part.modularity)}\tcommunities={part.community_count}"
          f"\tlevels={part.levels}", file=err)


def cmd_experiment(args, out, err):
    extra, given = {}, set()
    config = SweepConfig()
    if args.config is not None:
        try:
            given = config_keys(Path(args.config).read_text(encoding="utf-8"))
            config, extra = SweepConfig.from_file(args.config)
        except OSError as exc:
            raise CliError("input", str(exc)) from None
        except ValueError as exc:
            raise CliError("usage", f"bad config {args.config}: {exc}") from None
    source = args.input or extra.pop("input", None)
    if source is None:
        raise CliError("usage", "experiment needs an input (argument or 'input' in the config)")
    if "delimiter" in extra:
        args.delimiter = _delimiter(extra.pop("delimiter"))
    if "header" in extra:
        args.header = extra.pop("header").lower() in ("1", "true", "yes", "on")
    if "min_rating" in extra:
        args.min_rating = float(extra.pop("min_rating"))
    outdir = extra.pop("output", None)
    if extra:
        raise CliError("usage", f"unknown config keys: {', '.join(sorted(extra))}")
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    elif "master_seed" not in given:
        overrides["master_seed"] = _resolve_seed(args, err)
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.jobs is not None:
        overrides["n_jobs"] = args.jobs
    if overrides:
        config = SweepConfig(**{**config.__dict__, **overrides})

    g = _load(args, source)
    report = run_sweep(g, config)
    target = args.output or outdir
    if target is None:
        out.write(report.to_json() + "\n")
    else:
        for p in report.write(target):
            print(f"wrote {p}", file=err)


def cmd_southern_women(args, out, err):
    seed = _resolve_seed(args, err)
    g = tfidf_reweight(southern_women(), base=args.log_base)
    f = filter_by_threshold(g, args.tau)
    part = louvain(project(f, USERS), seed=seed)
    groups = sorted(part.communities(), key=lambda c: min(int(k) for k in c))
    absent = sorted(set(g.users) - set(f.users), key=int)
    with _out(args, out) as fh:
        for i, members in enumerate(groups, start=1):
            fh.write(f"group {i}\t{' '.join(sorted(members, key=int))}\n")
        fh.write(f"absent\t{' '.join(absent)}\n")
    print(f"modularity={_fmt(part.modularity)}", file=err)


COMMANDS = {
    "stats": cmd_stats, "top-objects": cmd_top_objects, "fit-degrees": cmd_fit_degrees,
    "tfidf": cmd_tfidf, "filter": cmd_filter, "project": cmd_project,
    "communities": cmd_communities, "experiment": cmd_experiment,
    "southern-women": cmd_southern_women,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        _configure_logging(args.log_level)
        COMMANDS[args.command](args, out, err)
        return 0
    except CliError as exc:
        category = exc.category
        message = str(exc)
    except UonetError as exc:
        category, message = "computation", str(exc)
    except (ValueError, ArithmeticError) as exc:
        category, message = "computation", str(exc)
    print(f"uonet-error: {category}: {message}", file=err)
    return {"usage": EXIT_USAGE, "input": EXIT_INPUT}.get(category, EXIT_COMPUTE)


if __name__ == "__main__":
    sys.exit(main())
