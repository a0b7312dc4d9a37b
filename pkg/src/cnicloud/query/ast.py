"""Parsed and checked query representations."""

from __future__ import annotations

from dataclasses import dataclass

# Sentinel for COUNT(*) in select/order positions, also its output column name.
COUNT_STAR = "count(*)"


@dataclass(frozen=True, slots=True)
class ColumnRef:
    table: str | None  # as written; resolution happens in validate
    name: str
    pos: int


@dataclass(frozen=True, slots=True)
class CountStar:
    pos: int


@dataclass(frozen=True, slots=True)
class Literal:
    kind: str  # "str" | "int"
    text: str  # as written, for error messages
    value: str | int
    pos: int


@dataclass(frozen=True, slots=True)
class Comparison:
    column: ColumnRef
    op: str
    literal: Literal


@dataclass(frozen=True, slots=True)
class JoinClause:
    table: str | None  # explicit JOIN table, None for the bare-ON form
    left: ColumnRef
    right: ColumnRef
    pos: int


@dataclass(frozen=True, slots=True)
class OrderClause:
    key: ColumnRef | CountStar
    descending: bool


@dataclass(frozen=True, slots=True)
class QueryAst:
    select_star: bool
    select: tuple[ColumnRef | CountStar, ...]
    from_table: str
    from_pos: int
    join: JoinClause | None
    where: tuple[Comparison, ...]
    group_by: tuple[ColumnRef, ...]
    order_by: OrderClause | None
    limit: int | None


@dataclass(frozen=True, slots=True)
class CheckedColumn:
    """A column resolved against the catalog."""

    table: str  # canonical: tFile | tMsg
    column: str  # canonical column name
    attr: str  # record attribute
    ctype: str  # "str" | "int" | "time"


@dataclass(frozen=True, slots=True)
class CheckedComparison:
    column: CheckedColumn
    op: str
    value: str | int  # typed per the column


@dataclass(frozen=True, slots=True)
class CheckedOrder:
    key: CheckedColumn | str  # CheckedColumn or COUNT_STAR
    descending: bool


@dataclass(frozen=True, slots=True)
class CheckedQuery:
    from_table: str  # canonical
    join: bool
    select: tuple[CheckedColumn | str, ...]  # CheckedColumn or COUNT_STAR
    output_names: tuple[str, ...]
    include_body: bool
    where: tuple[CheckedComparison, ...]
    group_by: tuple[CheckedColumn, ...]
    order_by: CheckedOrder | None
    limit: int | None
