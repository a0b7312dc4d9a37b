"""Decode dropped log files and populate the metastore.

Decoding and validation happen entirely before any table mutation, so a
failing file leaves the store untouched.  Message bodies are hashed and then
dropped; only the (MsgPath, LineNo) pointer is retained.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateFile, IoFailure, MalformedBlock, MalformedName
from .logmodel import (
    FileRecord,
    MessageBody,
    MsgRecord,
    iter_blocks,
    msg_hash,
    parse_filename,
)
from .metastore import Metastore


@dataclass(frozen=True, slots=True)
class DecodedMessage:
    """One parsed block: header line number, timestamp, type, body."""

    lineno: int
    time: int  # epoch ms
    msgtype: str
    body: MessageBody


def decode_log(path: str | os.PathLike) -> list[DecodedMessage]:
    """Parse a decoded-format log file into messages in file order."""
    try:
        with open(path, "r", encoding="utf-8", newline="\n") as fh:
            return [
                DecodedMessage(lineno, time_ms, msgtype, body)
                for lineno, time_ms, msgtype, body in iter_blocks(fh)
            ]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def ingest_file(path: str | os.PathLike, store: Metastore) -> tuple[FileRecord, int]:
    """Decode one log and insert its tFile row plus one tMsg row per message."""
    filepath = str(path)
    if store.has_file(filepath):
        raise DuplicateFile(f"{filepath} already ingested")
    key = parse_filename(filepath)
    messages = decode_log(path)
    filerec = FileRecord(
        filepath=filepath, phone=key.model, carrier=key.operator, time=key.time_ms
    )
    msgrecs = [
        MsgRecord(
            filepath=filepath,
            time=msg.time,
            msgtype=msg.msgtype,
            msghash=msg_hash(msg.body),
            msgpath=filepath,
            lineno=msg.lineno,
        )
        for msg in messages
    ]
    store.insert_file(filerec)
    store.insert_msgs(msgrecs)
    return filerec, len(msgrecs)


@dataclass
class IngestSummary:
    ok: list[str]
    skipped: list[tuple[str, str]]  # (filepath, reason)
    n_messages: int

    def format(self) -> str:
        lines = [
            f"ingested {len(self.ok)} file(s), {self.n_messages} message(s);"
            f" skipped {len(self.skipped)}"
        ]
        for filepath, reason in self.skipped:
            lines.append(f"  skipped {filepath}: {reason}")
        return "\n".join(lines)


def ingest_dir(dirpath: str | os.PathLike, store: Metastore) -> IngestSummary:
    """Ingest every ``*.log`` entry in lexicographic order; errors are recorded."""
    root = Path(dirpath)
    try:
        names = sorted(p.name for p in root.iterdir() if p.name.endswith(".log"))
    except OSError as exc:
        raise IoFailure(f"cannot list {root}: {exc}") from exc
    summary = IngestSummary(ok=[], skipped=[], n_messages=0)
    for name in names:
        filepath = str(root / name)
        try:
            _, count = ingest_file(filepath, store)
        except (MalformedName, MalformedBlock, DuplicateFile, IoFailure) as exc:
            summary.skipped.append((filepath, f"{type(exc).__name__}: {exc}"))
        else:
            summary.ok.append(filepath)
            summary.n_messages += count
    return summary
