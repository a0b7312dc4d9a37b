"""Command-line interface.

The metadata store is in-memory and rebuilt by re-ingesting, so every data
command takes a ``--data`` directory (default: $CNICLOUD_DATA or ./data) and
ingests it before running.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import cluster, detailstore, patternmatch
from .corpus import CorpusSpec, generate_corpus
from .errors import CniCloudError, QueryError
from .ingest import ingest_dir
from .metastore import Metastore
from .query import execute_sql
from .query.execute import ResultSet
from .query.validate import parse_msg_conditions


def _add_data_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data",
        default=os.environ.get("CNICLOUD_DATA", "data"),
        help="log directory to ingest (default: $CNICLOUD_DATA or ./data)",
    )


def _load_store(data_dir: str) -> Metastore:
    store = Metastore()
    summary = ingest_dir(data_dir, store)
    if summary.skipped:
        print(summary.format(), file=sys.stderr)
    return store


def _print_result(rs: ResultSet, fmt: str) -> None:
    if fmt == "json":
        print(
            json.dumps(
                {
                    "columns": rs.columns,
                    "rows": [list(r) for r in rs.rows],
                    "stats": {
                        "rows_scanned": rs.stats.rows_scanned,
                        "body_resolutions": rs.stats.body_resolutions,
                        "elapsed": rs.stats.elapsed,
                    },
                }
            )
        )
        return
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(rs.columns)
        writer.writerows(rs.rows)
        sys.stdout.write(out.getvalue())
        return
    # table: newlines in cells (Body) are escaped to keep rows on one line
    rows = [tuple(cell.replace("\n", "\\n") for cell in row) for row in rs.rows]
    widths = [len(c) for c in rs.columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    header = "  ".join(c.ljust(w) for c, w in zip(rs.columns, widths))
    print(header)
    print("  ".join("-" * w for w in widths))
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _cmd_gen(args) -> int:
    lo, _, hi = args.msgs.partition("..")
    spec = CorpusSpec(
        seed=args.seed,
        n_files=args.files,
        msgs_per_file=(int(lo), int(hi) if hi else int(lo)),
    )
    manifest = generate_corpus(spec, args.out)
    manifest_path = Path(args.manifest or Path(args.out) / "manifest.json")
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")
    print(
        f"wrote {len(manifest.files)} files, {manifest.n_messages} messages"
        f" to {args.out} (manifest: {manifest_path})"
    )
    return 0


def _cmd_ingest(args) -> int:
    store = Metastore()
    summary = ingest_dir(args.dir, store)
    print(summary.format())
    print(
        f"tFile rows: {store.tfile_count}; tMsg rows: {store.tmsg_count};"
        f" metadata bytes: {store.counters.snapshot()['metadata_bytes']}"
    )
    return 0


def _cmd_query(args) -> int:
    store = _load_store(args.data)
    rs = execute_sql(args.sql, store, args.workers)
    _print_result(rs, args.format)
    print(
        f"{len(rs.rows)} row(s); scanned {rs.stats.rows_scanned};"
        f" resolved {rs.stats.body_resolutions} bodies;"
        f" {rs.stats.elapsed * 1000:.1f} ms",
        file=sys.stderr,
    )
    return 0


def _cmd_param(args) -> int:
    store = _load_store(args.data)
    conditions = parse_msg_conditions(args.where or "")
    table = detailstore.build_details(store, conditions)
    counts = detailstore.param_distribution(table, args.path, args.group_by)
    if args.group_by:
        for (group, value), count in sorted(counts.items()):
            print(f"{group} {value} {count}")
    else:
        for value, count in sorted(counts.items()):
            print(f"{value} {count}")
    return 0


def _cmd_match(args) -> int:
    store = _load_store(args.data)
    pattern_text = Path(args.pattern).read_text(encoding="utf-8")
    pattern = patternmatch.parse_pattern(pattern_text, max_gap=args.max_gap)
    conditions = parse_msg_conditions(args.where or "")
    for span in patternmatch.find_matches(store, pattern, conditions):
        print(f"{span.msgpath} {','.join(str(n) for n in span.linenos)}")
    return 0


def _cmd_bench(args) -> int:
    store = _load_store(args.data)
    queries = [
        line.strip()
        for line in Path(args.queries).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    worker_counts = [int(n) for n in args.workers.split(",")]
    report = cluster.bench(queries, worker_counts, args.reps, store)
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="utf-8")
    print(report.format())
    return 0


def _cmd_serve(args) -> int:
    import logging

    import uvicorn

    from .server import ServerConfig, create_app

    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(message)s")
    # Ingest under the resolved path so stored Filepath values match the
    # download root even when --data is relative.
    data_dir = Path(args.data).resolve()
    config = ServerConfig(
        data_dir=data_dir,
        port=args.port,
        workers=args.workers,
        static_dir=Path(args.static) if args.static else None,
    )
    store = _load_store(str(data_dir))
    print(
        f"serving {store.tfile_count} files / {store.tmsg_count} messages"
        f" on {args.host}:{config.port}",
        file=sys.stderr,
    )
    app = create_app(store, config)
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnicloud", description="crowdsourced cellular-log analytics"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--files", type=int, required=True)
    p.add_argument("--msgs", required=True, help="messages per file, LO..HI")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="manifest path (default OUT/manifest.json)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("ingest", help="ingest a log directory and print a summary")
    p.add_argument("dir")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("query", help="run one SQL statement")
    p.add_argument("sql")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    _add_data_arg(p)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("param", help="distribution of a dotted body path")
    p.add_argument("path")
    p.add_argument("--where", help="tMsg filter, e.g. \"MsgType = '4G_LTE_RRC'\"")
    p.add_argument("--group-by", dest="group_by", help="tFile column to group by")
    _add_data_arg(p)
    p.set_defaults(func=_cmd_param)

    p = sub.add_parser("match", help="search for a message-sequence pattern")
    p.add_argument("--pattern", required=True, help="pattern file, one step per line")
    p.add_argument("--where", help="tMsg filter applied before matching")
    p.add_argument("--max-gap", dest="max_gap", type=int, default=None)
    _add_data_arg(p)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("bench", help="time queries across worker counts")
    p.add_argument("--workers", default="1,3,5", help="comma-separated counts")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--queries", required=True, help="file with one query per line")
    p.add_argument("--out", help="CSV report path")
    _add_data_arg(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("CNICLOUD_PORT", "8070")),
    )
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--static", help="directory of console assets to serve at /")
    _add_data_arg(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QueryError as exc:
        print(exc.message, file=sys.stderr)
        return 2
    except CniCloudError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
