"""Command line entry point.

Exit codes: 0 success, 2 parse error (data or query text), 3 planning error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

from . import engine, synth
from .errors import (
    PlanError,
    QuerySyntaxError,
    TripleParseError,
    UnknownPredicateError,
    UnresolvedPrefixError,
    UnsupportedFeatureError,
)
from .ingest import load_triple_file, save_snapshot

EXIT_PARSE = 2
EXIT_PLAN = 3
EXIT_IO = 4

_PARSE_ERRORS = (TripleParseError, QuerySyntaxError, UnresolvedPrefixError, UnsupportedFeatureError)
_PLAN_ERRORS = (PlanError, UnknownPredicateError)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wcoj", description="Worst-case optimal join engine for triple data")
    sub = p.add_subparsers(dest="command", required=True)

    load = sub.add_parser("load", help="parse a triple file and write a binary snapshot")
    load.add_argument("file")
    load.add_argument("--out", required=True)

    query = sub.add_parser("query", help="run a query against a triple file or snapshot")
    query.add_argument("database")
    query.add_argument("query_file")
    _add_toggles(query)
    query.add_argument("--stats", metavar="OUT_JSON", help="write run counters as JSON")
    query.add_argument("--out", help="write result TSV here instead of stdout")

    explain = sub.add_parser("explain", help="print the chosen plan")
    explain.add_argument("database")
    explain.add_argument("query_file")
    _add_toggles(explain)

    gen = sub.add_parser("gen", help="generate a synthetic triple file")
    gen.add_argument("kind", choices=["lubm_like", "adversarial_triangle", "uniform_random"])
    gen.add_argument("n", type=int)
    gen.add_argument("seed", type=int)
    gen.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="time every query in a directory")
    bench.add_argument("database")
    bench.add_argument("query_dir")
    bench.add_argument("--repeat", type=int, default=7)
    _add_toggles(bench)

    stats = sub.add_parser("stats", help="dump predicate cardinalities as TSV")
    stats.add_argument("database")
    return p


def _add_toggles(p: argparse.ArgumentParser) -> None:
    p.add_argument("--engine", choices=["wcoj", "pairwise"], default="wcoj")
    p.add_argument("--layout", choices=["auto", "uint", "bitset"], default="auto")
    p.add_argument("--attr-reorder", choices=["on", "off"], default="on")
    p.add_argument("--ghd-pushdown", choices=["on", "off"], default="on")
    p.add_argument("--pipeline", choices=["on", "off"], default="on")
    p.add_argument("--threads", type=int, default=1)


def _config(args: argparse.Namespace) -> engine.RunConfig:
    return engine.RunConfig(
        engine=args.engine,
        layout=args.layout,
        attr_reorder=args.attr_reorder == "on",
        ghd_pushdown=args.ghd_pushdown == "on",
        pipeline=args.pipeline == "on",
        threads=args.threads,
    )


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_load(args) -> int:
    db = load_triple_file(args.file)
    save_snapshot(db, args.out)
    print(f"{db.triple_count} triples, {len(db.predicates)} predicates, "
          f"{len(db.dictionary)} terms -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    db = load_triple_file(args.database)
    text = _read_text(args.query_file)
    t0 = time.perf_counter()
    run = engine.run_query(db, text, _config(args))
    wall_us = int((time.perf_counter() - t0) * 1e6)
    tsv = engine.format_tsv(db, run.result)
    if args.out:
        Path(args.out).write_text(tsv, encoding="utf-8")
    else:
        sys.stdout.write(tsv)
    if args.stats:
        payload = run.stats.as_dict()
        payload["wall_time_us"] = wall_us
        Path(args.stats).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_explain(args) -> int:
    db = load_triple_file(args.database)
    sys.stdout.write(engine.explain(db, _read_text(args.query_file), _config(args)))
    return 0


def _cmd_gen(args) -> int:
    Path(args.out).write_text(synth.generate_synthetic(args.kind, args.n, args.seed), encoding="utf-8")
    return 0


def bench_summary(times_us: list[float]) -> float:
    """Discard the single best and worst run, report the median of the rest."""
    ordered = sorted(times_us)
    kept = ordered[1:-1] if len(ordered) > 2 else ordered
    return statistics.median(kept)


def _cmd_bench(args) -> int:
    db = load_triple_file(args.database)
    config = _config(args)
    files = sorted(Path(args.query_dir).glob("*.sparql"))
    if not files:
        raise FileNotFoundError(f"no .sparql files under {args.query_dir}")
    for qf in files:
        text = qf.read_text(encoding="utf-8")
        times = []
        rows = 0
        for _ in range(max(3, args.repeat)):
            t0 = time.perf_counter()
            run = engine.run_query(db, text, config)
            times.append((time.perf_counter() - t0) * 1e6)
            rows = run.stats.output_count
        print(f"{qf.name}\t{bench_summary(times):.0f}\t{rows}")
    return 0


def _cmd_stats(args) -> int:
    db = load_triple_file(args.database)
    sys.stdout.write(db.stats_tsv())
    return 0


_COMMANDS = {
    "load": _cmd_load,
    "query": _cmd_query,
    "explain": _cmd_explain,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _PLAN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
