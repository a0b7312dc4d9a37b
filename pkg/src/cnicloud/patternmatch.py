"""Message-sequence pattern search within each file's chronological stream.

Semantics (documented so users can reason about matches): greedy leftmost
with no backtracking and no overlap.  The first step binds to the earliest
message at or after the current search position; each later step binds to
the earliest later message satisfying it with at most ``max_gap`` messages
skipped in between.  If a later step cannot bind, the attempt is abandoned
and the search restarts just after the first step's binding; after a full
match it resumes after the match's last message.  Patterns never span
files.

Pattern wire format: one step per line, ``MSGTYPE [path=value ...]`` with
``*`` as the message-type wildcard.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .corpus import _oracle_parse
from .errors import IoFailure
from .logmodel import MessageBody
from .metastore import Condition, Metastore


@dataclass(frozen=True, slots=True)
class Step:
    msgtype: str | None  # None is the wildcard
    constraints: tuple[tuple[str, str], ...]  # (dotted path, expected scalar)


@dataclass(frozen=True, slots=True)
class Pattern:
    steps: tuple[Step, ...]
    max_gap: int | None = None  # messages allowed between consecutive bindings

    def __post_init__(self):
        if not self.steps:
            raise ValueError("pattern needs at least one step")
        if self.max_gap is not None and self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")


@dataclass(frozen=True, slots=True)
class MatchSpan:
    msgpath: str
    linenos: tuple[int, ...]  # matched header lines, in step order


def parse_pattern(text: str, max_gap: int | None = None) -> Pattern:
    """Parse the one-step-per-line wire format; blank lines are skipped."""
    steps = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        msgtype = None if tokens[0] == "*" else tokens[0]
        constraints = []
        for item in tokens[1:]:
            path, sep, value = item.partition("=")
            if not sep or not path:
                raise ValueError(f"bad constraint {item!r} (expected path=value)")
            constraints.append((path, value))
        steps.append(Step(msgtype=msgtype, constraints=tuple(constraints)))
    return Pattern(steps=tuple(steps), max_gap=max_gap)


def _step_accepts(
    step: Step, msgtype: str, get_body: Callable[[], MessageBody]
) -> bool:
    if step.msgtype is not None and msgtype != step.msgtype:
        return False
    if step.constraints:
        body = get_body()
        for path, expected in step.constraints:
            if body.get(path) != expected:
                return False
    return True


def find_matches(
    store: Metastore,
    pattern: Pattern,
    conditions: Iterable[Condition] | None = None,
) -> list[MatchSpan]:
    """Greedy scan over each file's (filtered) message stream.

    Bodies are resolved lazily, only when a step carries constraints, and at
    most once per message per call.
    """
    by_file: dict[str, list] = {}
    for rec in store.scan_tmsg(conditions):
        by_file.setdefault(rec.msgpath, []).append(rec)
    spans: list[MatchSpan] = []
    for msgpath in sorted(by_file):
        records = sorted(by_file[msgpath], key=lambda r: r.lineno)
        cache: dict[int, MessageBody] = {}

        def get_body(index: int, records=records, cache=cache) -> MessageBody:
            if index not in cache:
                cache[index] = store.resolve_content(records[index])
            return cache[index]

        start = 0
        while start < len(records):
            bound = _bind_from(records, start, pattern, get_body)
            if bound is None:
                break
            idxs, matched = bound
            if matched:
                spans.append(
                    MatchSpan(
                        msgpath=msgpath,
                        linenos=tuple(records[i].lineno for i in idxs),
                    )
                )
                start = idxs[-1] + 1
            else:
                start = idxs[0] + 1
    return spans


def _bind_from(records, start, pattern, get_body):
    """Attempt one match with the first step anchored at or after start.

    Returns (indexes, True) on a full match, (first_index, False) when a
    later step failed, or None when the first step no longer matches
    anywhere.
    """
    n = len(records)
    first = None
    for j in range(start, n):
        rec = records[j]
        if _step_accepts(
            pattern.steps[0], rec.msgtype, lambda j=j: get_body(j)
        ):
            first = j
            break
    if first is None:
        return None
    idxs = [first]
    for step in pattern.steps[1:]:
        lo = idxs[-1] + 1
        hi = n if pattern.max_gap is None else min(n, lo + pattern.max_gap + 1)
        found = None
        for j in range(lo, hi):
            rec = records[j]
            if _step_accepts(step, rec.msgtype, lambda j=j: get_body(j)):
                found = j
                break
        if found is None:
            return [first], False
        idxs.append(found)
    return idxs, True


def oracle_find(dirpath: str | os.PathLike, pattern: Pattern) -> list[MatchSpan]:
    """Reference implementation: re-parse every file, no indexes, no laziness.

    Implements the documented greedy semantics directly over fully
    materialized messages.
    """
    root = Path(dirpath)
    try:
        names = sorted(p.name for p in root.iterdir() if p.name.endswith(".log"))
    except OSError as exc:
        raise IoFailure(f"cannot list {root}: {exc}") from exc
    spans: list[MatchSpan] = []
    for name in names:
        path = root / name
        messages = _oracle_parse(path)  # (lineno, time_ms, msgtype, body)
        start = 0
        while start < len(messages):
            # Anchor: earliest message at/after start satisfying step 0.
            first = None
            for j in range(start, len(messages)):
                if _oracle_accepts(pattern.steps[0], messages[j]):
                    first = j
                    break
            if first is None:
                break
            idxs = [first]
            failed = False
            for step in pattern.steps[1:]:
                lo = idxs[-1] + 1
                hi = (
                    len(messages)
                    if pattern.max_gap is None
                    else min(len(messages), lo + pattern.max_gap + 1)
                )
                found = None
                for j in range(lo, hi):
                    if _oracle_accepts(step, messages[j]):
                        found = j
                        break
                if found is None:
                    failed = True
                    break
                idxs.append(found)
            if failed:
                start = first + 1
            else:
                spans.append(
                    MatchSpan(
                        msgpath=str(path),
                        linenos=tuple(messages[i][0] for i in idxs),
                    )
                )
                start = idxs[-1] + 1
    return spans


def _oracle_accepts(step: Step, message) -> bool:
    _, _, msgtype, body = message
    if step.msgtype is not None and msgtype != step.msgtype:
        return False
    for path, expected in step.constraints:
        if body.get(path) != expected:
            return False
    return True
