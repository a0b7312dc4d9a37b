"""Seeded synthetic log-corpus generator and brute-force oracle.

Stands in for a real crowdsourced upload set at desk scale: ``generate_corpus``
writes decoded-format log files named by the filename convention, and
``oracle_scan`` re-reads them with no indexes as ground truth for tests.

The per-message-type weights below are arbitrary; no real per-type
distribution is being imitated.  "ATT" stands in for AT&T because '&' is
outside the filename charset.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from .errors import IoFailure, MalformedBlock
from .logmodel import (
    FileRecord,
    LogFileKey,
    MessageBody,
    MsgRecord,
    encode_filename,
    msg_hash,
    parse_filename,
    render_block,
)
from .rng import SplitMix64

DEFAULT_OPERATORS = ("ATT", "T-Mobile", "Verizon", "Sprint")
DEFAULT_MODELS = (
    "Pixel",
    "Nexus-6P",
    "Nexus-6",
    "Galaxy-S4",
    "Galaxy-S5",
    "Optimus-2",
    "Tribute",
)
DEFAULT_MSGTYPE_WEIGHTS: Mapping[str, int] = {
    "4G_LTE_RRC": 3,
    "LTE_PHY": 4,
    "LTE_MAC": 3,
    "LTE_RLC": 2,
    "LTE_PDCP": 2,
    "LTE_NAS_EMM": 1,
    "LTE_NAS_ESM": 1,
}
# 2015-07-31T00:00:00Z .. 2017-02-28T23:59:59Z
DEFAULT_TIME_RANGE_MS = (1438300800000, 1488326399000)
DEFAULT_DRX_TIMER_VALUES = (20, 40, 80)

DRX_TIMER_PATH = "rrc.drx.shortDRX-Timer"


@dataclass(frozen=True)
class CorpusSpec:
    seed: int
    n_files: int
    msgs_per_file: tuple[int, int]  # inclusive lo..hi
    operators: tuple[str, ...] = DEFAULT_OPERATORS
    models: tuple[str, ...] = DEFAULT_MODELS
    msgtype_weights: Mapping[str, int] = field(
        default_factory=lambda: dict(DEFAULT_MSGTYPE_WEIGHTS)
    )
    time_range_ms: tuple[int, int] = DEFAULT_TIME_RANGE_MS
    drx_timer_values: tuple[int, ...] = DEFAULT_DRX_TIMER_VALUES

    def __post_init__(self):
        if self.n_files < 1:
            raise ValueError("n_files must be positive")
        lo, hi = self.msgs_per_file
        if lo < 1 or hi < lo:
            raise ValueError("msgs_per_file range is empty")
        if not self.operators or not self.models:
            raise ValueError("operators and models must be non-empty")
        if not self.msgtype_weights or any(
            w <= 0 for w in self.msgtype_weights.values()
        ):
            raise ValueError("msgtype weights must be positive")
        if self.time_range_ms[1] < self.time_range_ms[0]:
            raise ValueError("time range is empty")
        if not self.drx_timer_values:
            raise ValueError("drx_timer_values must be non-empty")


@dataclass
class CorpusManifest:
    """Ground truth recorded while generating a corpus."""

    files: list[tuple[str, int]]  # (filename, message count)
    n_messages: int
    msgtype_counts: dict[str, int]
    operator_msgtype_counts: dict[str, dict[str, int]]
    drx_counts: dict[str, int]

    def count_for_file(self, filename: str) -> int:
        for name, count in self.files:
            if name == filename:
                return count
        raise KeyError(filename)

    def validate(self) -> None:
        if sum(count for _, count in self.files) != self.n_messages:
            raise ValueError("per-file counts do not sum to n_messages")
        if sum(self.msgtype_counts.values()) != self.n_messages:
            raise ValueError("msgtype counts do not sum to n_messages")
        per_type: dict[str, int] = {}
        for by_type in self.operator_msgtype_counts.values():
            for msgtype, count in by_type.items():
                per_type[msgtype] = per_type.get(msgtype, 0) + count
        if per_type != self.msgtype_counts:
            raise ValueError("operator/msgtype counts disagree with msgtype counts")

    def to_json(self) -> str:
        payload = {
            "files": [{"filename": n, "n_messages": c} for n, c in self.files],
            "totals": {
                "n_messages": self.n_messages,
                "msgtype_counts": self.msgtype_counts,
                "operator_msgtype_counts": self.operator_msgtype_counts,
                "drx_counts": self.drx_counts,
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CorpusManifest":
        payload = json.loads(text)
        totals = payload["totals"]
        return cls(
            files=[(f["filename"], f["n_messages"]) for f in payload["files"]],
            n_messages=totals["n_messages"],
            msgtype_counts=dict(totals["msgtype_counts"]),
            operator_msgtype_counts={
                op: dict(by_type)
                for op, by_type in totals["operator_msgtype_counts"].items()
            },
            drx_counts=dict(totals["drx_counts"]),
        )


def _rrc_body(rng: SplitMix64, drx_values: tuple[int, ...]) -> tuple[MessageBody, str]:
    drx = str(rng.choice(drx_values))
    drx_entries = (
        ("shortDRX-Timer", drx),
        ("longDRX-Cycle", str(rng.choice((40, 80, 160, 320)))),
    )
    rrc_entries: list = [
        ("state", rng.choice(("CONNECTED", "IDLE"))),
        ("drx", MessageBody(drx_entries)),
    ]
    if rng.randrange(2) == 0:
        meas = MessageBody(
            (
                ("rsrp", str(-rng.randint(60, 120))),
                ("rsrq", str(-rng.randint(3, 20))),
            )
        )
        rrc_entries.append(("meas", meas))
    body = MessageBody(
        (
            ("rrc", MessageBody(tuple(rrc_entries))),
            ("cell", str(rng.randint(1, 65535))),
        )
    )
    return body, drx


def _generic_body(rng: SplitMix64, msgtype: str) -> MessageBody:
    if msgtype == "LTE_PHY":
        inner = (
            ("rsrp", str(-rng.randint(60, 120))),
            ("sinr", str(rng.randint(-5, 30))),
        )
        group = "phy"
    elif msgtype == "LTE_MAC":
        inner = (
            ("grants", str(rng.randint(0, 500))),
            ("bsr", str(rng.randint(0, 63))),
        )
        group = "mac"
    elif msgtype == "LTE_RLC":
        inner = (
            ("mode", rng.choice(("AM", "UM"))),
            ("pdus", str(rng.randint(1, 200))),
        )
        group = "rlc"
    elif msgtype == "LTE_PDCP":
        inner = (
            ("sn", str(rng.randint(0, 4095))),
            ("dropped", str(rng.randint(0, 9))),
        )
        group = "pdcp"
    elif msgtype == "LTE_NAS_EMM":
        inner = (
            ("state", rng.choice(("REGISTERED", "DEREGISTERED", "TAU"))),
            ("cause", str(rng.randint(0, 15))),
        )
        group = "emm"
    elif msgtype == "LTE_NAS_ESM":
        inner = (
            ("bearer", str(rng.randint(1, 11))),
            ("qci", str(rng.randint(1, 9))),
        )
        group = "esm"
    else:
        inner = (("raw", str(rng.randint(0, 10**6))),)
        group = "misc"
    return MessageBody(
        ((group, MessageBody(inner)), ("cell", str(rng.randint(1, 65535))))
    )


def generate_corpus(spec: CorpusSpec, outdir: str | os.PathLike) -> CorpusManifest:
    """Write a deterministic corpus into ``outdir`` and return its manifest.

    Identical specs produce byte-identical directory trees.
    """
    out = Path(outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    rng = SplitMix64(spec.seed)
    t0, t1 = spec.time_range_ms
    types = tuple(spec.msgtype_weights)
    weights = tuple(spec.msgtype_weights[t] for t in types)

    files: list[tuple[str, int]] = []
    msgtype_counts: dict[str, int] = {}
    operator_msgtype: dict[str, dict[str, int]] = {}
    drx_counts: dict[str, int] = {}
    used_names: set[str] = set()

    for _ in range(spec.n_files):
        operator = rng.choice(spec.operators)
        model = rng.choice(spec.models)
        lat = rng.randint(-900000, 900000) / 10000.0
        lon = rng.randint(-1800000, 1800000) / 10000.0
        collect_s = rng.randint(t0 // 1000, t1 // 1000)
        while True:
            key = LogFileKey(
                time=_utc(collect_s), lat=lat, lon=lon, model=model, operator=operator
            )
            name = encode_filename(key)
            if name not in used_names:
                break
            collect_s += 1
        used_names.add(name)

        n_msgs = rng.randint(*spec.msgs_per_file)
        times = sorted(rng.randint(t0, t1) for _ in range(n_msgs))
        blocks: list[str] = []
        for time_ms in times:
            msgtype = rng.weighted_choice(types, weights)
            if msgtype == "4G_LTE_RRC":
                body, drx = _rrc_body(rng, spec.drx_timer_values)
                drx_counts[drx] = drx_counts.get(drx, 0) + 1
            else:
                body = _generic_body(rng, msgtype)
            blocks.append(render_block(time_ms, msgtype, body))
            msgtype_counts[msgtype] = msgtype_counts.get(msgtype, 0) + 1
            by_type = operator_msgtype.setdefault(operator, {})
            by_type[msgtype] = by_type.get(msgtype, 0) + 1

        try:
            with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("".join(blocks))
        except OSError as exc:
            raise IoFailure(f"cannot write {out / name}: {exc}") from exc
        files.append((name, n_msgs))

    return CorpusManifest(
        files=files,
        n_messages=sum(count for _, count in files),
        msgtype_counts=msgtype_counts,
        operator_msgtype_counts=operator_msgtype,
        drx_counts=drx_counts,
    )


def _utc(epoch_s: int):
    from datetime import datetime, timezone

    return datetime.fromtimestamp(epoch_s, tz=timezone.utc)


OracleRow = tuple[FileRecord, MsgRecord, MessageBody]
OraclePredicate = Callable[[FileRecord, MsgRecord, MessageBody], bool]


def oracle_scan(
    dirpath: str | os.PathLike, predicate: OraclePredicate | None = None
) -> list[OracleRow]:
    """Brute-force ground truth: re-parse every log with no indexes.

    Deliberately does not share the block parser with the ingest path so the
    two routes stay independent.
    """
    root = Path(dirpath)
    try:
        names = sorted(p.name for p in root.iterdir() if p.name.endswith(".log"))
    except OSError as exc:
        raise IoFailure(f"cannot list {root}: {exc}") from exc
    rows: list[OracleRow] = []
    for name in names:
        path = root / name
        key = parse_filename(name)
        filerec = FileRecord(
            filepath=str(path), phone=key.model, carrier=key.operator, time=key.time_ms
        )
        for lineno, time_ms, msgtype, body in _oracle_parse(path):
            msgrec = MsgRecord(
                filepath=str(path),
                time=time_ms,
                msgtype=msgtype,
                msghash=msg_hash(body),
                msgpath=str(path),
                lineno=lineno,
            )
            if predicate is None or predicate(filerec, msgrec, body):
                rows.append((filerec, msgrec, body))
    return rows


def _oracle_parse(path: Path) -> list[tuple[int, int, str, MessageBody]]:
    """Minimal independent block reader (distinct from logmodel.iter_blocks)."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    messages = []
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line.startswith("# MSG "):
            raise MalformedBlock(i + 1, f"expected header, found {line!r}")
        try:
            ts_text, msgtype = line[len("# MSG ") :].split(" ")
            time_ms = int(ts_text)
        except ValueError:
            raise MalformedBlock(i + 1, f"bad header {line!r}") from None
        header_lineno = i + 1
        i += 1
        entries, i = _oracle_entries(lines, i, 0)
        messages.append((header_lineno, time_ms, msgtype, MessageBody(entries)))
    return messages


def _oracle_entries(lines: list[str], i: int, level: int) -> tuple[tuple, int]:
    entries: list = []
    while i < len(lines):
        line = lines[i]
        if line.startswith("# MSG "):
            break
        indent = len(line) - len(line.lstrip(" "))
        if indent % 2 != 0 or indent // 2 > level:
            raise MalformedBlock(i + 1, f"bad indent in {line!r}")
        if indent // 2 < level:
            break
        stripped = line[indent:]
        if ": " in stripped:
            key, value = stripped.split(": ", 1)
            entries.append((key, value))
            i += 1
        elif stripped.endswith(":") and len(stripped) > 1:
            key = stripped[:-1]
            sub, i = _oracle_entries(lines, i + 1, level + 1)
            entries.append((key, MessageBody(sub)))
        else:
            raise MalformedBlock(i + 1, f"bad body line {line!r}")
    return tuple(entries), i
