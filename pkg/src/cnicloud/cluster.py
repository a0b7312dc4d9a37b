"""Scale-out execution across hash partitions, plus the benchmark harness.

Workers are forked OS processes, one per partition, each running the
scan/join/partial-aggregation stage of a plan over its partition; a single
merge point combines partials and runs the shared finalize step, so results
are byte-identical to sequential execution for every worker count.

Workers require the ``fork`` start method (the store is inherited by the
child processes; nothing large crosses the pipe except result partials).
Bare tFile scans are not partitioned -- tFile is the broadcast side -- so
those plans run sequentially whatever the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import multiprocessing
import statistics
import threading
import time
from dataclasses import dataclass, field

from .errors import CniCloudError, QueryError
from .metastore import Counters, Metastore
from .query.execute import (
    ResultSet,
    execute_plan,
    finalize,
    merge_partials,
    scan_partition,
)
from .query.parser import parse
from .query.plan import Plan, plan
from .query.validate import validate

# Read by forked workers; published under _FORK_LOCK for the fork window only.
_FORK_STATE: tuple | None = None
_FORK_LOCK = threading.Lock()


def _worker_run(ordinal: int):
    plan_, store, partitions = _FORK_STATE
    # The inherited counters lock may have been held by another parent
    # thread at fork time; swap in fresh counters (this copy's increments
    # are discarded anyway -- the parent re-applies reported deltas).
    store.counters = Counters()
    start = time.perf_counter()
    partial, examined = scan_partition(plan_, store, partitions[ordinal])
    return partial, examined, time.perf_counter() - start


def _worker_entry(ordinal: int):
    # One indirection: the child resolves _worker_run in its forked module
    # namespace, so only this stable name ever crosses the pickle boundary.
    return _worker_run(ordinal)


@dataclass
class WorkerStats:
    rows_scanned: int
    elapsed: float


@dataclass
class WorkerPool:
    """Fan-out/fan-in runner; records per-worker stats of the last run."""

    n_workers: int
    worker_stats: list[WorkerStats] = field(default_factory=list)

    def run(self, plan_: Plan, store: Metastore) -> tuple[object, int]:
        global _FORK_STATE
        partitions = store.partition(self.n_workers)
        ctx = multiprocessing.get_context("fork")
        # Workers snapshot _FORK_STATE when Pool() forks them, so it only
        # needs to be stable across that window.
        with _FORK_LOCK:
            _FORK_STATE = (plan_, store, partitions)
            try:
                pool = ctx.Pool(self.n_workers)
            finally:
                _FORK_STATE = None
        self.worker_stats = []
        partials = []
        examined_total = 0
        try:
            pending = [
                pool.apply_async(_worker_entry, (i,)) for i in range(self.n_workers)
            ]
            for result in pending:
                partial, examined, elapsed = result.get()
                partials.append(partial)
                examined_total += examined
                self.worker_stats.append(WorkerStats(examined, elapsed))
            pool.close()
        except BaseException:
            # First worker failure cancels the rest; nothing gets merged.
            pool.terminate()
            raise
        finally:
            pool.join()
        return merge_partials(plan_, partials), examined_total


def parallel_execute(plan_: Plan, store: Metastore, n: int) -> ResultSet:
    """Run a plan across n partitioned workers; result equals workers=1."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1 or plan_.scan_table == "tFile":
        return execute_plan(plan_, store)
    t0 = time.perf_counter()
    pool = WorkerPool(n)
    merged, examined = pool.run(plan_, store)
    # Worker-side counter increments happened in forked copies; account for
    # the scan work here in the parent's store.
    store.counters.add(rows_scanned=examined)
    return finalize(plan_, store, merged, examined, t0)


class BenchError(CniCloudError):
    """A benchmark run aborted (bad query or inconsistent results)."""


@dataclass
class BenchCell:
    query: str
    n_workers: int
    times: list[float]
    result_digest: str

    @property
    def min_s(self) -> float:
        return min(self.times)

    @property
    def median_s(self) -> float:
        return statistics.median(self.times)


@dataclass
class BenchReport:
    cells: list[BenchCell]
    n_files: int
    n_messages: int
    repetitions: int

    def speedup(self, cell: BenchCell, which: str = "median") -> float | None:
        """Speedup vs the 1-worker cell of the same query; None without one."""
        base = next(
            (
                c
                for c in self.cells
                if c.query == cell.query and c.n_workers == 1
            ),
            None,
        )
        if base is None:
            return None
        if which == "min":
            return base.min_s / cell.min_s
        return base.median_s / cell.median_s

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(
            [
                "query",
                "n_workers",
                "repetitions",
                "min_s",
                "median_s",
                "speedup_min",
                "speedup_median",
                "result_digest",
            ]
        )
        for cell in self.cells:
            writer.writerow(
                [
                    cell.query,
                    cell.n_workers,
                    self.repetitions,
                    f"{cell.min_s:.6f}",
                    f"{cell.median_s:.6f}",
                    _fmt(self.speedup(cell, "min")),
                    _fmt(self.speedup(cell, "median")),
                    cell.result_digest,
                ]
            )
        return out.getvalue()

    def format(self) -> str:
        lines = [
            f"corpus: {self.n_files} files, {self.n_messages} messages;"
            f" {self.repetitions} repetition(s) per cell"
        ]
        for cell in self.cells:
            lines.append(
                f"  workers={cell.n_workers:<2d} min={cell.min_s * 1000:9.2f} ms"
                f" median={cell.median_s * 1000:9.2f} ms"
                f" speedup(median)={_fmt(self.speedup(cell))}"
                f"  {cell.query}"
            )
        return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def result_digest(rs: ResultSet) -> str:
    h = hashlib.sha256()
    h.update("\x1f".join(rs.columns).encode("utf-8"))
    for row in rs.rows:
        h.update(b"\x1e")
        h.update("\x1f".join(row).encode("utf-8"))
    return h.hexdigest()


def bench(
    queries: list[str],
    worker_counts: list[int],
    repetitions: int,
    store: Metastore,
) -> BenchReport:
    """Measure each query at each worker count over an already-built store.

    Warms each query once, then records wall time for ``repetitions`` runs
    per cell.  Result sets must be identical across repetitions and worker
    counts; a QueryError aborts the whole run naming the offending query.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    plans = []
    for sql in queries:
        try:
            plans.append(plan(validate(parse(sql))))
        except QueryError as exc:
            raise BenchError(f"query {sql!r} rejected: {exc.message}") from exc
    cells: list[BenchCell] = []
    for sql, plan_ in zip(queries, plans):
        execute_plan(plan_, store)  # warm (file cache, lazy imports)
        expected_digest: str | None = None
        for n in worker_counts:
            times = []
            digest = None
            for _ in range(repetitions):
                t0 = time.perf_counter()
                rs = parallel_execute(plan_, store, n)
                times.append(time.perf_counter() - t0)
                d = result_digest(rs)
                if digest is None:
                    digest = d
                elif digest != d:
                    raise BenchError(
                        f"query {sql!r} produced differing results across"
                        f" repetitions at workers={n}"
                    )
            if expected_digest is None:
                expected_digest = digest
            elif digest != expected_digest:
                raise BenchError(
                    f"query {sql!r} produced differing results across worker"
                    " counts"
                )
            cells.append(
                BenchCell(
                    query=sql, n_workers=n, times=times, result_digest=digest
                )
            )
    return BenchReport(
        cells=cells,
        n_files=store.tfile_count,
        n_messages=store.tmsg_count,
        repetitions=repetitions,
    )
