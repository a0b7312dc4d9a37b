"""In-memory metadata database.

Holds the tFile and tMsg tables with secondary indexes on MsgType and
Filepath, hash partitions for scale-out scans, accounting counters, and the
lazy index-based body resolver.  Metadata-only queries never touch disk;
message bodies are fetched through ``resolve_content`` and verified against
the stored content hash.

Concurrency contract: many concurrent readers OR one writer.  Counters are
safe under concurrent increments.
"""

from __future__ import annotations

import operator
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DuplicateFile, IoFailure, MalformedBlock, StaleIndex, UnknownFile
from .logmodel import (
    HEADER_PREFIX,
    FileRecord,
    MessageBody,
    MsgRecord,
    _BodyBuilder,
    fnv1a64,
    msg_hash,
    parse_header,
)

_OPS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

TMSG_FIELDS = ("filepath", "time", "msgtype", "msghash", "msgpath", "lineno")
TFILE_FIELDS = ("filepath", "phone", "carrier", "time")


@dataclass(frozen=True, slots=True)
class Condition:
    """One comparison against a record field; a filter is a conjunction."""

    field: str  # lowercase record attribute name
    op: str  # one of = != < <= > >=
    value: str | int

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"bad comparison operator {self.op!r}")


def matches(record, conditions: Sequence[Condition]) -> bool:
    for cond in conditions:
        if not _OPS[cond.op](getattr(record, cond.field), cond.value):
            return False
    return True


class Counters:
    """Accounting counters; increments may come from concurrent readers."""

    def __init__(self):
        self._lock = threading.Lock()
        self.metadata_bytes = 0
        self.body_resolutions = 0
        self.rows_scanned = 0

    def add(
        self, metadata_bytes: int = 0, body_resolutions: int = 0, rows_scanned: int = 0
    ) -> None:
        with self._lock:
            self.metadata_bytes += metadata_bytes
            self.body_resolutions += body_resolutions
            self.rows_scanned += rows_scanned

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return {
                "metadata_bytes": self.metadata_bytes,
                "body_resolutions": self.body_resolutions,
                "rows_scanned": self.rows_scanned,
            }


@dataclass(frozen=True)
class Partition:
    """View over the tMsg rows whose filepath hash lands on this ordinal."""

    ordinal: int
    n: int
    row_ids: tuple[int, ...]
    id_set: frozenset[int]


class Metastore:
    def __init__(self):
        self._tfile: list[FileRecord] = []
        self._tfile_by_path: dict[str, int] = {}
        self._tmsg: list[MsgRecord] = []
        self._by_msgtype: dict[str, list[int]] = {}
        self._by_filepath: dict[str, list[int]] = {}
        self._phash: list[int] = []
        self.counters = Counters()

    # -- table access -------------------------------------------------------

    @property
    def tfile_count(self) -> int:
        return len(self._tfile)

    @property
    def tmsg_count(self) -> int:
        return len(self._tmsg)

    def has_file(self, filepath: str) -> bool:
        return filepath in self._tfile_by_path

    def file_for_path(self, filepath: str) -> FileRecord | None:
        idx = self._tfile_by_path.get(filepath)
        return self._tfile[idx] if idx is not None else None

    def msg_row(self, row_id: int) -> MsgRecord:
        return self._tmsg[row_id]

    # -- writes -------------------------------------------------------------

    def insert_file(self, rec: FileRecord) -> int:
        if rec.filepath in self._tfile_by_path:
            raise DuplicateFile(f"{rec.filepath} already present in tFile")
        row_id = len(self._tfile)
        self._tfile.append(rec)
        self._tfile_by_path[rec.filepath] = row_id
        self.counters.add(metadata_bytes=rec.serialized_size())
        return row_id

    def insert_msgs(self, recs: Sequence[MsgRecord]) -> int | None:
        for rec in recs:
            if rec.filepath not in self._tfile_by_path:
                raise UnknownFile(f"{rec.filepath} not present in tFile")
        first = len(self._tmsg) if recs else None
        added_bytes = 0
        hash_cache: dict[str, int] = {}
        for rec in recs:
            row_id = len(self._tmsg)
            self._tmsg.append(rec)
            self._by_msgtype.setdefault(rec.msgtype, []).append(row_id)
            self._by_filepath.setdefault(rec.filepath, []).append(row_id)
            phash = hash_cache.get(rec.filepath)
            if phash is None:
                phash = fnv1a64(rec.filepath.encode("utf-8"))
                hash_cache[rec.filepath] = phash
            self._phash.append(phash)
            added_bytes += rec.serialized_size()
        self.counters.add(metadata_bytes=added_bytes)
        return first

    # -- reads --------------------------------------------------------------

    def scan_tmsg(
        self,
        conditions: Iterable[Condition] | None = None,
        partition: Partition | None = None,
        examined_out: list[int] | None = None,
    ) -> Iterator[MsgRecord]:
        """Yield matching tMsg rows; never touches disk.

        Uses the MsgType index when the conjunction pins msgtype to a
        constant; otherwise scans the (partition of the) table.  Bumps
        rows_scanned by the number of rows actually examined; the same
        number is appended to ``examined_out`` when given.
        """
        conds = tuple(conditions or ())
        for cond in conds:
            if cond.field not in TMSG_FIELDS:
                raise ValueError(f"unknown tMsg field {cond.field!r}")
        pinned = next(
            (c.value for c in conds if c.field == "msgtype" and c.op == "="), None
        )
        examined = 0
        try:
            if pinned is not None:
                ids: Iterable[int] = self._by_msgtype.get(pinned, ())
                if partition is not None:
                    ids = [i for i in ids if i in partition.id_set]
                for i in ids:
                    rec = self._tmsg[i]
                    examined += 1
                    if matches(rec, conds):
                        yield rec
            else:
                ids = partition.row_ids if partition is not None else range(len(self._tmsg))
                if conds:
                    for i in ids:
                        rec = self._tmsg[i]
                        examined += 1
                        if matches(rec, conds):
                            yield rec
                else:
                    for i in ids:
                        examined += 1
                        yield self._tmsg[i]
        finally:
            self.counters.add(rows_scanned=examined)
            if examined_out is not None:
                examined_out.append(examined)

    def scan_tfile(
        self,
        conditions: Iterable[Condition] | None = None,
        examined_out: list[int] | None = None,
    ) -> Iterator[FileRecord]:
        conds = tuple(conditions or ())
        for cond in conds:
            if cond.field not in TFILE_FIELDS:
                raise ValueError(f"unknown tFile field {cond.field!r}")
        examined = 0
        try:
            for rec in self._tfile:
                examined += 1
                if matches(rec, conds):
                    yield rec
        finally:
            self.counters.add(rows_scanned=examined)
            if examined_out is not None:
                examined_out.append(examined)

    def resolve_content(self, rec: MsgRecord) -> MessageBody:
        """Fetch one message body by its (MsgPath, LineNo) pointer.

        Verifies the content hash; a mismatch or a non-header line means the
        file changed since ingestion (StaleIndex).
        """
        try:
            with open(rec.msgpath, "r", encoding="utf-8", newline="\n") as fh:
                for _ in range(rec.lineno - 1):
                    if fh.readline() == "":
                        raise StaleIndex(
                            f"{rec.msgpath}: line {rec.lineno} is past end of file"
                        )
                header = fh.readline()
                if header == "":
                    raise StaleIndex(
                        f"{rec.msgpath}: line {rec.lineno} is past end of file"
                    )
                line = header[:-1] if header.endswith("\n") else header
                if not line.startswith(HEADER_PREFIX):
                    raise StaleIndex(
                        f"{rec.msgpath}: line {rec.lineno} is not a message header"
                    )
                try:
                    parse_header(line, rec.lineno)
                    builder = _BodyBuilder(rec.lineno)
                    lineno = rec.lineno
                    for raw in fh:
                        lineno += 1
                        body_line = raw[:-1] if raw.endswith("\n") else raw
                        if body_line.startswith(HEADER_PREFIX):
                            break
                        builder.add_line(body_line, lineno)
                    body = builder.finish()
                except MalformedBlock as exc:
                    raise StaleIndex(f"{rec.msgpath}: {exc}") from exc
        except OSError as exc:
            raise IoFailure(f"cannot read {rec.msgpath}: {exc}") from exc
        if msg_hash(body) != rec.msghash:
            raise StaleIndex(
                f"{rec.msgpath}:{rec.lineno}: content hash mismatch"
            )
        self.counters.add(body_resolutions=1)
        return body

    def partition(self, n: int) -> list[Partition]:
        """Split tMsg into n disjoint, jointly exhaustive hash partitions."""
        if n < 1:
            raise ValueError("n must be positive")
        buckets: list[list[int]] = [[] for _ in range(n)]
        for row_id, phash in enumerate(self._phash):
            buckets[phash % n].append(row_id)
        return [
            Partition(
                ordinal=i, n=n, row_ids=tuple(ids), id_set=frozenset(ids)
            )
            for i, ids in enumerate(buckets)
        ]
