"""Plan execution over the metastore.

Output contract:

* every cell is a string: counts and LineNo in decimal, tFile.Time as the
  compact UTC stamp, tMsg.Time as epoch milliseconds, Body as the canonical
  serialization;
* ordering is total and deterministic: the explicit ORDER BY key (ties
  broken by lexicographic comparison of the rendered row), else the group
  key ascending for aggregated queries, else (MsgPath, LineNo) when tMsg is
  scanned or (Filepath) for bare tFile scans;
* bodies are resolved only for rows actually returned (after sort + limit),
  exactly once per returned row, and only for ``SELECT *`` over tMsg.

The same scan/merge/finalize pieces serve both the sequential path and the
partitioned worker path, which is what makes results worker-invariant.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..logmodel import canonicalize_body, format_compact_utc
from ..metastore import Metastore, Partition
from .ast import COUNT_STAR, CheckedColumn
from .parser import parse
from .plan import Plan, plan
from .validate import validate


@dataclass
class QueryStats:
    rows_scanned: int = 0
    body_resolutions: int = 0
    elapsed: float = 0.0


@dataclass
class ResultSet:
    columns: list[str]
    rows: list[tuple[str, ...]]
    stats: QueryStats = field(default_factory=QueryStats)


def _value(col: CheckedColumn, msgrec, filerec):
    return getattr(msgrec if col.table == "tMsg" else filerec, col.attr)


def _render(col: CheckedColumn, value) -> str:
    if col.ctype == "str":
        return value
    if col.ctype == "time" and col.table == "tFile":
        return format_compact_utc(value)
    return str(value)


def _iter_pairs(plan: Plan, store: Metastore, partition, examined_out):
    """Yield (msgrec, filerec) row pairs after pushdown filters and join."""
    if plan.scan_table == "tMsg":
        build = None
        if plan.join_build:
            build = {}
            for filerec in store.scan_tfile(
                plan.build_conditions, examined_out=examined_out
            ):
                build[filerec.filepath] = filerec
        scan = store.scan_tmsg(
            plan.scan_conditions, partition, examined_out=examined_out
        )
        if build is None:
            for msgrec in scan:
                yield msgrec, None
        else:
            for msgrec in scan:
                filerec = build.get(msgrec.filepath)
                if filerec is not None:
                    yield msgrec, filerec
    else:
        for filerec in store.scan_tfile(plan.scan_conditions, examined_out=examined_out):
            yield None, filerec


def scan_partition(plan: Plan, store: Metastore, partition: Partition | None):
    """Run the scan(+join)(+partial aggregation) stage over one partition.

    Returns ``(partial, rows_examined)`` where partial is a group-count dict
    for aggregated plans with GROUP BY, an int for a bare COUNT(*), or the
    list of surviving row pairs otherwise.
    """
    examined_out: list[int] = []
    pairs = _iter_pairs(plan, store, partition, examined_out)
    if plan.aggregate:
        if plan.group_by:
            groups: dict[tuple, int] = {}
            for msgrec, filerec in pairs:
                key = tuple(_value(col, msgrec, filerec) for col in plan.group_by)
                groups[key] = groups.get(key, 0) + 1
            partial: object = groups
        else:
            partial = sum(1 for _ in pairs)
    else:
        partial = list(pairs)
    return partial, sum(examined_out)


def merge_partials(plan: Plan, partials: list):
    """Combine per-partition partials (in partition-ordinal order)."""
    if plan.aggregate:
        if plan.group_by:
            merged: dict[tuple, int] = {}
            for groups in partials:
                for key, count in groups.items():
                    merged[key] = merged.get(key, 0) + count
            return merged
        return sum(partials)
    rows = []
    for chunk in partials:
        rows.extend(chunk)
    return rows


def finalize(
    plan: Plan, store: Metastore, merged, rows_examined: int, t0: float
) -> ResultSet:
    """Shared tail: sort, limit, render, resolve bodies, assemble stats."""
    stats = QueryStats(rows_scanned=rows_examined)
    if plan.aggregate:
        rows = _finalize_aggregate(plan, merged)
    else:
        rows = _finalize_rows(plan, store, merged, stats)
    stats.elapsed = time.perf_counter() - t0
    return ResultSet(columns=list(plan.output_names), rows=rows, stats=stats)


def _finalize_aggregate(plan: Plan, merged) -> list[tuple[str, ...]]:
    if not plan.group_by:
        count = merged
        return [tuple(str(count) for _ in plan.select)][: plan.limit]
    group_index = {col: i for i, col in enumerate(plan.group_by)}
    selectors = [
        None if item == COUNT_STAR else group_index[item] for item in plan.select
    ]
    decorated = []
    for key, count in merged.items():
        row = tuple(
            str(count) if gi is None else _render(plan.select[si], key[gi])
            for si, gi in enumerate(selectors)
        )
        decorated.append((key, count, row))
    if plan.order_by is None:
        decorated.sort(key=lambda d: d[0])
    else:
        decorated.sort(key=lambda d: d[2])  # rendered-row tie break
        if plan.order_by.key == COUNT_STAR:
            decorated.sort(key=lambda d: d[1], reverse=plan.order_by.descending)
        else:
            gi = group_index[plan.order_by.key]
            decorated.sort(key=lambda d: d[0][gi], reverse=plan.order_by.descending)
    if plan.limit is not None:
        decorated = decorated[: plan.limit]
    return [row for _, _, row in decorated]


def _finalize_rows(
    plan: Plan, store: Metastore, pairs: list, stats: QueryStats
) -> list[tuple[str, ...]]:
    decorated = []
    for msgrec, filerec in pairs:
        row = tuple(_render(col, _value(col, msgrec, filerec)) for col in plan.select)
        if plan.order_by is not None:
            sort_key = _value(plan.order_by.key, msgrec, filerec)
        elif plan.scan_table == "tMsg":
            sort_key = (msgrec.msgpath, msgrec.lineno)
        else:
            sort_key = (filerec.filepath,)
        decorated.append((sort_key, msgrec, row))
    if plan.order_by is None:
        decorated.sort(key=lambda d: d[0])
    else:
        decorated.sort(key=lambda d: d[2])  # rendered-row tie break
        decorated.sort(key=lambda d: d[0], reverse=plan.order_by.descending)
    if plan.limit is not None:
        decorated = decorated[: plan.limit]
    if not plan.include_body:
        return [row for _, _, row in decorated]
    rows = []
    for _, msgrec, row in decorated:
        body = store.resolve_content(msgrec)
        stats.body_resolutions += 1
        rows.append(row + (canonicalize_body(body).decode("utf-8"),))
    return rows


def execute_plan(plan: Plan, store: Metastore) -> ResultSet:
    """Sequential execution: one scan over the whole store."""
    t0 = time.perf_counter()
    partial, examined = scan_partition(plan, store, None)
    return finalize(plan, store, partial, examined, t0)


def execute(plan: Plan, store: Metastore, workers: int = 1) -> ResultSet:
    """Run a plan; workers > 1 fans out across hash partitions."""
    if workers < 1:
        raise ValueError("workers must be positive")
    if workers == 1:
        return execute_plan(plan, store)
    from ..cluster import parallel_execute

    return parallel_execute(plan, store, workers)


def execute_sql(sql: str, store: Metastore, workers: int = 1) -> ResultSet:
    """Parse, validate, plan, and execute; raises QueryError on bad input."""
    return execute(plan(validate(parse(sql))), store, workers)
