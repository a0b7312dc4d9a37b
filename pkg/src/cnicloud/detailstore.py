"""Key-value detail table: message bodies flattened to dotted paths.

Rows are addressed by (MsgPath, LineNo, dotted path) and hold the scalar at
that path.  Tables are built on demand for a row filter rather than eagerly
for the whole store, which bounds retained memory; a built table is
immutable and freely shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import UNKNOWN_COLUMN, QueryError
from .logmodel import FileRecord, format_compact_utc
from .metastore import Condition, Metastore
from .query.validate import CATALOG


@dataclass(frozen=True, slots=True)
class DetailKey:
    msgpath: str
    lineno: int
    path: str  # dotted key path, e.g. rrc.drx.shortDRX-Timer


@dataclass(frozen=True, slots=True)
class DetailRow:
    key: DetailKey
    value: str


class DetailTable:
    """Immutable after build_details returns it."""

    def __init__(self):
        self.rows: list[DetailRow] = []
        self.n_messages = 0
        self.bytes_retained = 0
        self._values: dict[tuple[str, int, str], str] = {}
        self._files: dict[tuple[str, int], FileRecord] = {}

    def file_for_message(self, msgpath: str, lineno: int) -> FileRecord | None:
        return self._files.get((msgpath, lineno))


def build_details(
    store: Metastore, conditions: Iterable[Condition] | None = None
) -> DetailTable:
    """Resolve every matching message once and emit one row per scalar leaf.

    Rows appear in (MsgPath, LineNo) order, leaves depth-first within each
    message.
    """
    table = DetailTable()
    records = sorted(
        store.scan_tmsg(conditions), key=lambda r: (r.msgpath, r.lineno)
    )
    for rec in records:
        body = store.resolve_content(rec)
        locator = (rec.msgpath, rec.lineno)
        table._files[locator] = store.file_for_path(rec.filepath)
        table.n_messages += 1
        for path, value in body.leaves():
            key = DetailKey(rec.msgpath, rec.lineno, path)
            table.rows.append(DetailRow(key, value))
            table._values[(rec.msgpath, rec.lineno, path)] = value
            table.bytes_retained += len(rec.msgpath) + len(path) + len(value) + 8
    return table


def get(table: DetailTable, key: DetailKey) -> str | None:
    """Exact-match lookup; None when the key is absent."""
    return table._values.get((key.msgpath, key.lineno, key.path))


def param_distribution(
    table: DetailTable, path: str, group_by: str | None = None
) -> dict:
    """Count distinct scalars at ``path`` over all messages in the table.

    Ungrouped: {value: count}.  With ``group_by`` (a tFile column), keys are
    (group value, value) and the per-group counts sum to the ungrouped ones.
    """
    group_col = None
    if group_by is not None:
        lowered = {c.lower(): c for c in CATALOG["tFile"]}
        canonical = lowered.get(group_by.lower())
        if canonical is None:
            raise QueryError(
                UNKNOWN_COLUMN, f"unknown column '{group_by}' in tFile"
            )
        group_col = CATALOG["tFile"][canonical]  # (attr, ctype)
    counts: dict = {}
    for row in table.rows:
        if row.key.path != path:
            continue
        if group_col is None:
            counts[row.value] = counts.get(row.value, 0) + 1
        else:
            filerec = table.file_for_message(row.key.msgpath, row.key.lineno)
            attr, ctype = group_col
            raw = getattr(filerec, attr)
            group = format_compact_utc(raw) if ctype == "time" else str(raw)
            counts[(group, row.value)] = counts.get((group, row.value), 0) + 1
    return counts
