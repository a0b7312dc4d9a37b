"""Domain types and codecs shared by every other module.

Covers the log filename grammar, the decoded-log block format, nested
message bodies, and message content hashing.

Filename grammar (bit-exact)::

    cniCloud_<YYYYMMDDTHHMMSSZ>_<lat>,<lon>_<MODEL>_<OPERATOR>.log

``lat``/``lon`` are printed with exactly 4 fraction digits, sign only when
negative.  Field tokens draw from ``[A-Za-z0-9.,+-]`` -- underscore is the
field separator and is therefore forbidden inside fields.

Decoded-log block format (bit-exact)::

    # MSG <epoch_ms> <MsgType>
    <key>: <scalar>
    <key>:
      <subkey>: <scalar>

A block is one header line followed by body lines until the next header or
EOF.  Body lines are indented by exactly two spaces per nesting level; the
body section of a block is byte-identical to ``canonicalize_body`` of the
parsed body, which is what makes line-number seeks and hash verification
work.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, Union

from .errors import InvalidToken, MalformedBlock, MalformedName

FILENAME_PREFIX = "cniCloud_"
FILENAME_SUFFIX = ".log"
HEADER_PREFIX = "# MSG "

# Underscore is reserved as the filename field separator.
_FILENAME_TOKEN_RE = re.compile(r"[A-Za-z0-9.,+-]+\Z")
# Message types carry underscores (e.g. 4G_LTE_RRC); they never appear in
# filenames, only in block headers, which are space-delimited.
_MSGTYPE_RE = re.compile(r"[A-Za-z0-9_.+-]+\Z")
# Body keys exclude '.' so dotted paths split unambiguously, and ':'/space
# so body lines parse unambiguously.
_BODY_KEY_RE = re.compile(r"[A-Za-z0-9_+-]+\Z")
_TIMESTAMP_RE = re.compile(r"\d{8}T\d{6}Z\Z")

MAX_BODY_DEPTH = 16

# Message types with first-class meaning in the corpus; unrecognized type
# tokens are carried through verbatim everywhere.
KNOWN_MSG_TYPES = (
    "4G_LTE_RRC",
    "LTE_NAS_EMM",
    "LTE_NAS_ESM",
    "LTE_PHY",
    "LTE_MAC",
    "LTE_RLC",
    "LTE_PDCP",
)


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a: offset basis 0xcbf29ce484222325, prime 0x100000001b3."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def format_compact_utc(ms: int) -> str:
    """Render epoch milliseconds as the filename timestamp form (UTC, seconds)."""
    dt = datetime.fromtimestamp(ms // 1000, tz=timezone.utc)
    return (
        f"{dt.year:04d}{dt.month:02d}{dt.day:02d}"
        f"T{dt.hour:02d}{dt.minute:02d}{dt.second:02d}Z"
    )


def parse_compact_utc(text: str) -> int:
    """Parse ``YYYYMMDDTHHMMSSZ`` to epoch milliseconds; ValueError if invalid."""
    if not _TIMESTAMP_RE.match(text):
        raise ValueError(f"bad timestamp {text!r}")
    dt = datetime.strptime(text, "%Y%m%dT%H%M%SZ").replace(tzinfo=timezone.utc)
    return int(dt.timestamp()) * 1000


def _format_coord(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


Scalar = str
BodyValue = Union[Scalar, "MessageBody"]


@dataclass(frozen=True, slots=True)
class MessageBody:
    """Ordered key-value tree holding one decoded cellular message.

    Keys are unique among siblings; scalar values are verbatim strings
    (queries coerce on demand); nesting depth is capped at
    ``MAX_BODY_DEPTH`` levels.
    """

    entries: tuple[tuple[str, BodyValue], ...] = ()

    def __post_init__(self):
        seen = set()
        for key, value in self.entries:
            if not _BODY_KEY_RE.match(key):
                raise ValueError(f"bad body key {key!r}")
            if key in seen:
                raise ValueError(f"duplicate sibling key {key!r}")
            seen.add(key)
            if isinstance(value, str):
                if "\n" in value:
                    raise ValueError(f"scalar for {key!r} contains a newline")
            elif isinstance(value, MessageBody):
                # Children were validated at their own construction, so one
                # level of depth accounting here bounds the whole tree.
                if value.depth() >= MAX_BODY_DEPTH:
                    raise ValueError(f"nesting under {key!r} exceeds {MAX_BODY_DEPTH}")
            else:
                raise TypeError(f"value for {key!r} must be str or MessageBody")

    def get(self, path: str) -> BodyValue | None:
        """Look up a dotted path; returns a scalar, a subtree, or None."""
        node: BodyValue = self
        for part in path.split("."):
            if not isinstance(node, MessageBody):
                return None
            for key, value in node.entries:
                if key == part:
                    node = value
                    break
            else:
                return None
        return node

    def leaves(self, prefix: str = "") -> Iterator[tuple[str, str]]:
        """Yield (dotted path, scalar) pairs depth-first in stored order."""
        for key, value in self.entries:
            path = f"{prefix}.{key}" if prefix else key
            if isinstance(value, MessageBody):
                yield from value.leaves(path)
            else:
                yield path, value

    def depth(self) -> int:
        """Nesting depth: 0 for an empty body, 1 for a flat one."""
        if not self.entries:
            return 0
        deepest = 1
        for _, value in self.entries:
            if isinstance(value, MessageBody):
                deepest = max(deepest, 1 + value.depth())
        return deepest


def body_from_dict(mapping: dict) -> MessageBody:
    """Build a MessageBody from a nested dict, preserving insertion order."""
    entries = []
    for key, value in mapping.items():
        if isinstance(value, dict):
            entries.append((key, body_from_dict(value)))
        else:
            entries.append((key, str(value)))
    return MessageBody(tuple(entries))


def canonicalize_body(body: MessageBody) -> bytes:
    """Deterministic serialization of a body; also the on-disk block body."""
    parts: list[str] = []
    _write_body(body, 0, parts)
    return "".join(parts).encode("utf-8")


def _write_body(body: MessageBody, depth: int, parts: list[str]) -> None:
    pad = "  " * depth
    for key, value in body.entries:
        if isinstance(value, MessageBody):
            parts.append(f"{pad}{key}:\n")
            _write_body(value, depth + 1, parts)
        else:
            parts.append(f"{pad}{key}: {value}\n")


def msg_hash(body: MessageBody) -> str:
    """Content fingerprint: 64-bit FNV-1a of the canonical body, 16 hex chars."""
    return f"{fnv1a64(canonicalize_body(body)):016x}"


@dataclass(frozen=True, slots=True)
class LogFileKey:
    """The five fields encoded in a log filename."""

    time: datetime  # UTC, second precision
    lat: float  # degrees, 4 fraction digits
    lon: float  # degrees, 4 fraction digits
    model: str
    operator: str

    def __post_init__(self):
        for field_name, token in (("model", self.model), ("operator", self.operator)):
            if not _FILENAME_TOKEN_RE.match(token):
                raise InvalidToken(
                    f"{field_name} {token!r} contains characters outside [A-Za-z0-9.,+-]"
                )
        if self.time.tzinfo is None:
            raise ValueError("time must be timezone-aware UTC")
        # Normalize to UTC second precision and quantized coordinates so
        # that encode/parse round-trips are exact.
        object.__setattr__(
            self, "time", self.time.astimezone(timezone.utc).replace(microsecond=0)
        )
        lat = round(float(self.lat), 4) + 0.0  # +0.0 folds -0.0 into 0.0
        lon = round(float(self.lon), 4) + 0.0
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"lat {lat} out of range [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise ValueError(f"lon {lon} out of range [-180, 180]")
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)

    @property
    def time_ms(self) -> int:
        return int(self.time.timestamp()) * 1000


def encode_filename(key: LogFileKey) -> str:
    """Render a LogFileKey as its canonical filename."""
    stamp = format_compact_utc(key.time_ms)
    loc = f"{_format_coord(key.lat)},{_format_coord(key.lon)}"
    return f"{FILENAME_PREFIX}{stamp}_{loc}_{key.model}_{key.operator}{FILENAME_SUFFIX}"


def parse_filename(name: str) -> LogFileKey:
    """Parse a log filename (any directory prefix is trimmed first)."""
    base = name.rsplit("/", 1)[-1]
    if not base.startswith(FILENAME_PREFIX):
        raise MalformedName(f"{base!r}: missing {FILENAME_PREFIX!r} prefix")
    if not base.endswith(FILENAME_SUFFIX):
        raise MalformedName(f"{base!r}: missing {FILENAME_SUFFIX!r} suffix")
    stem = base[len(FILENAME_PREFIX) : -len(FILENAME_SUFFIX)]
    fields = stem.split("_")
    if len(fields) != 4:
        raise MalformedName(f"{base!r}: expected 4 fields, found {len(fields)}")
    stamp, loc, model, operator = fields
    try:
        time_ms = parse_compact_utc(stamp)
    except ValueError:
        raise MalformedName(f"{base!r}: bad timestamp {stamp!r}") from None
    loc_parts = loc.split(",")
    if len(loc_parts) != 2:
        raise MalformedName(f"{base!r}: location must be lat,lon")
    lat = _parse_coord(base, "lat", loc_parts[0], 90.0)
    lon = _parse_coord(base, "lon", loc_parts[1], 180.0)
    if not (_FILENAME_TOKEN_RE.match(model) and _FILENAME_TOKEN_RE.match(operator)):
        raise MalformedName(f"{base!r}: empty or invalid model/operator field")
    return LogFileKey(
        time=datetime.fromtimestamp(time_ms // 1000, tz=timezone.utc),
        lat=lat,
        lon=lon,
        model=model,
        operator=operator,
    )


def _parse_coord(base: str, which: str, text: str, bound: float) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedName(f"{base!r}: bad {which} {text!r}") from None
    # Only the encoder's canonical rendering is accepted, which keeps
    # parse/encode a strict inverse pair.
    if _format_coord(value) != text:
        raise MalformedName(f"{base!r}: non-canonical {which} {text!r}")
    if not -bound <= value <= bound:
        raise MalformedName(f"{base!r}: {which} {text!r} out of range")
    return value


@dataclass(frozen=True, slots=True)
class FileRecord:
    """One row of tFile."""

    filepath: str
    phone: str
    carrier: str
    time: int  # epoch ms, UTC

    def serialized_size(self) -> int:
        return len(f"{self.filepath}\t{self.phone}\t{self.carrier}\t{self.time}")


@dataclass(frozen=True, slots=True)
class MsgRecord:
    """One row of tMsg; (msgpath, lineno) locate the message block on disk."""

    filepath: str
    time: int  # epoch ms, UTC
    msgtype: str
    msghash: str
    msgpath: str
    lineno: int  # 1-based header line within msgpath

    def serialized_size(self) -> int:
        return len(
            f"{self.filepath}\t{self.time}\t{self.msgtype}"
            f"\t{self.msghash}\t{self.msgpath}\t{self.lineno}"
        )


def render_block(time_ms: int, msgtype: str, body: MessageBody) -> str:
    """Render one message as its on-disk block."""
    if not _MSGTYPE_RE.match(msgtype):
        raise ValueError(f"bad message type token {msgtype!r}")
    return f"{HEADER_PREFIX}{time_ms} {msgtype}\n" + canonicalize_body(body).decode(
        "utf-8"
    )


def parse_header(line: str, lineno: int) -> tuple[int, str]:
    """Parse a ``# MSG <epoch_ms> <MsgType>`` header line."""
    rest = line[len(HEADER_PREFIX) :]
    parts = rest.split(" ")
    if len(parts) != 2:
        raise MalformedBlock(lineno, f"bad header {line!r}")
    ts, msgtype = parts
    if not ts.isdigit() and not (ts.startswith("-") and ts[1:].isdigit()):
        raise MalformedBlock(lineno, f"bad header timestamp {ts!r}")
    if not _MSGTYPE_RE.match(msgtype):
        raise MalformedBlock(lineno, f"bad header message type {msgtype!r}")
    return int(ts), msgtype


class _BodyBuilder:
    """Builds a MessageBody from strictly-indented body lines."""

    def __init__(self, header_lineno: int):
        self.header_lineno = header_lineno
        # One frame per open nesting level: (parent_key, entries, sibling keys)
        self._frames: list[tuple[str | None, list, set]] = [(None, [], set())]

    def add_line(self, line: str, lineno: int) -> None:
        stripped = line.lstrip(" ")
        indent = len(line) - len(stripped)
        if indent % 2 != 0:
            raise MalformedBlock(lineno, f"indent of {indent} is not a multiple of 2")
        level = indent // 2
        if level >= MAX_BODY_DEPTH:
            raise MalformedBlock(lineno, f"nesting depth exceeds {MAX_BODY_DEPTH}")
        if level > len(self._frames) - 1:
            raise MalformedBlock(
                lineno, f"indent jumps from level {len(self._frames) - 1} to {level}"
            )
        while len(self._frames) - 1 > level:
            self._close_frame()
        key, sep, value = stripped.partition(": ")
        if not sep:
            if not stripped.endswith(":") or stripped == ":":
                raise MalformedBlock(lineno, f"bad body line {line!r}")
            key, value = stripped[:-1], None
        if not _BODY_KEY_RE.match(key):
            raise MalformedBlock(lineno, f"bad body key {key!r}")
        _, entries, seen = self._frames[-1]
        if key in seen:
            raise MalformedBlock(lineno, f"duplicate sibling key {key!r}")
        seen.add(key)
        if value is None:
            self._frames.append((key, [], set()))
        else:
            entries.append((key, value))

    def _close_frame(self) -> None:
        key, entries, _ = self._frames.pop()
        self._frames[-1][1].append((key, MessageBody(tuple(entries))))

    def finish(self) -> MessageBody:
        while len(self._frames) > 1:
            self._close_frame()
        return MessageBody(tuple(self._frames[0][1]))


def iter_blocks(
    lines: Iterable[str], start_lineno: int = 1
) -> Iterator[tuple[int, int, str, MessageBody]]:
    """Parse a decoded-log line stream into (lineno, time_ms, msgtype, body).

    ``lineno`` is the 1-based line number of each block's header line.
    Raises MalformedBlock on any deviation from the block format.
    """
    builder: _BodyBuilder | None = None
    pending: tuple[int, int, str] | None = None
    for lineno, raw in enumerate(lines, start_lineno):
        line = raw[:-1] if raw.endswith("\n") else raw
        if line.startswith(HEADER_PREFIX):
            if builder is not None and pending is not None:
                yield (*pending, builder.finish())
            time_ms, msgtype = parse_header(line, lineno)
            pending = (lineno, time_ms, msgtype)
            builder = _BodyBuilder(lineno)
        elif builder is None:
            raise MalformedBlock(lineno, "body line before any header")
        else:
            builder.add_line(line, lineno)
    if builder is not None and pending is not None:
        yield (*pending, builder.finish())
