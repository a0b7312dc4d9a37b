"""Semantic validation: resolve names against the catalog, type literals.

Comparison typing: string columns require quoted literals and compare
byte-lexicographically; LineNo takes integers (quoted digits are accepted);
Time columns take epoch-millisecond integers or timestamps written as
``YYYYMMDDTHHMMSSZ``, ``YYYY-MM-DDTHH:MM:SSZ``, ``YYYY-MM-DD HH:MM:SS`` or
``YYYY-MM-DD``, all UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone

from ..errors import (
    TYPE_MISMATCH,
    UNKNOWN_COLUMN,
    UNKNOWN_TABLE,
    UNSUPPORTED_FEATURE,
    QueryError,
)
from .ast import (
    COUNT_STAR,
    CheckedColumn,
    CheckedComparison,
    CheckedOrder,
    CheckedQuery,
    ColumnRef,
    CountStar,
    QueryAst,
)

# Canonical catalog: column -> (record attribute, comparison type)
CATALOG: dict[str, dict[str, tuple[str, str]]] = {
    "tFile": {
        "Filepath": ("filepath", "str"),
        "Phone": ("phone", "str"),
        "Carrier": ("carrier", "str"),
        "Time": ("time", "time"),
    },
    "tMsg": {
        "Filepath": ("filepath", "str"),
        "Time": ("time", "time"),
        "MsgType": ("msgtype", "str"),
        "MsgHash": ("msghash", "str"),
        "MsgPath": ("msgpath", "str"),
        "LineNo": ("lineno", "int"),
    },
}

_TABLES_LOWER = {name.lower(): name for name in CATALOG}
_COLUMNS_LOWER = {
    table: {column.lower(): column for column in columns}
    for table, columns in CATALOG.items()
}

_TIME_FORMATS = ("%Y-%m-%dT%H:%M:%SZ", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d")


def resolve_table(name: str, pos: int) -> str:
    canonical = _TABLES_LOWER.get(name.lower())
    if canonical is None:
        raise QueryError(
            UNKNOWN_TABLE,
            f"unknown table '{name}' (expected tFile or tMsg)",
            pos,
        )
    return canonical


def _checked(table: str, column: str) -> CheckedColumn:
    attr, ctype = CATALOG[table][column]
    return CheckedColumn(table=table, column=column, attr=attr, ctype=ctype)


def parse_time_literal(text: str) -> int | None:
    """Parse an accepted timestamp spelling to epoch ms, or None."""
    from ..logmodel import parse_compact_utc

    try:
        return parse_compact_utc(text)
    except ValueError:
        pass
    for fmt in _TIME_FORMATS:
        try:
            dt = datetime.strptime(text, fmt).replace(tzinfo=timezone.utc)
            return int(dt.timestamp()) * 1000
        except ValueError:
            continue
    return None


class _Scope:
    def __init__(self, tables: list[str]):
        self.tables = tables

    def resolve(self, ref: ColumnRef) -> CheckedColumn:
        if ref.table is not None:
            table = resolve_table(ref.table, ref.pos)
            if table not in self.tables:
                raise QueryError(
                    UNKNOWN_TABLE,
                    f"unknown table '{ref.table}': {table} is not part of this"
                    " query's FROM/JOIN",
                    ref.pos,
                )
            column = _COLUMNS_LOWER[table].get(ref.name.lower())
            if column is None:
                raise QueryError(
                    UNKNOWN_COLUMN,
                    f"unknown column '{ref.name}' in {table}",
                    ref.pos,
                )
            return _checked(table, column)
        hits = [
            (table, _COLUMNS_LOWER[table][ref.name.lower()])
            for table in self.tables
            if ref.name.lower() in _COLUMNS_LOWER[table]
        ]
        if len(hits) == 1:
            return _checked(*hits[0])
        if len(hits) > 1:
            options = " or ".join(f"{t}.{c}" for t, c in hits)
            raise QueryError(
                UNKNOWN_COLUMN,
                f"ambiguous column '{ref.name}': qualify it as {options}",
                ref.pos,
            )
        # Not in scope; say where it does exist, if anywhere.
        for table, columns in _COLUMNS_LOWER.items():
            if table not in self.tables and ref.name.lower() in columns:
                raise QueryError(
                    UNKNOWN_COLUMN,
                    f"unknown column '{ref.name}' in {self.tables[0]}"
                    f" ({columns[ref.name.lower()]} is a {table} column)",
                    ref.pos,
                )
        raise QueryError(
            UNKNOWN_COLUMN,
            f"unknown column '{ref.name}' in {' and '.join(self.tables)}",
            ref.pos,
        )


def _type_literal(column: CheckedColumn, literal) -> str | int:
    qualified = f"{column.table}.{column.column}"
    if column.ctype == "str":
        if literal.kind != "str":
            raise QueryError(
                TYPE_MISMATCH,
                f"type mismatch at position {literal.pos}: column {qualified}"
                f" expects a quoted string, got {literal.text}",
                literal.pos,
            )
        return literal.value
    if column.ctype == "int":
        if literal.kind == "int":
            return literal.value
        try:
            return int(literal.value)
        except ValueError:
            raise QueryError(
                TYPE_MISMATCH,
                f"type mismatch at position {literal.pos}: column {qualified}"
                f" expects an integer, got {literal.text}",
                literal.pos,
            ) from None
    # time
    if literal.kind == "int":
        return literal.value
    ms = parse_time_literal(literal.value)
    if ms is None:
        raise QueryError(
            TYPE_MISMATCH,
            f"type mismatch at position {literal.pos}: column {qualified}"
            f" expects a timestamp or epoch milliseconds, got {literal.text}",
            literal.pos,
        )
    return ms


def validate(ast: QueryAst) -> CheckedQuery:
    from_table = resolve_table(ast.from_table, ast.from_pos)

    join = False
    other: str | None = None
    if ast.join is not None:
        join = True
        join_scope = _Scope(list(CATALOG))
        left = join_scope.resolve(ast.join.left)
        right = join_scope.resolve(ast.join.right)
        if ast.join.table is not None:
            explicit = resolve_table(ast.join.table, ast.join.pos)
            if explicit == from_table:
                raise QueryError(
                    UNSUPPORTED_FEATURE,
                    f"unsupported feature at position {ast.join.pos}: self-joins",
                    ast.join.pos,
                )
        if {left.table, right.table} != {"tFile", "tMsg"} or not (
            left.column == right.column == "Filepath"
        ):
            raise QueryError(
                UNSUPPORTED_FEATURE,
                f"unsupported feature at position {ast.join.pos}: the only"
                " supported join equates tFile.Filepath with tMsg.Filepath",
                ast.join.pos,
            )
        other = "tMsg" if from_table == "tFile" else "tFile"

    scope = _Scope([from_table] + ([other] if other else []))
    both_tables = join

    def output_name(col: CheckedColumn) -> str:
        ambiguous = both_tables and all(
            col.column in CATALOG[t] for t in ("tFile", "tMsg")
        )
        return f"{col.table}.{col.column}" if ambiguous else col.column

    include_body = False
    if ast.select_star:
        select: list = []
        names: list[str] = []
        star_tables = [from_table] + ([other] if other else [])
        for table in star_tables:
            for column in CATALOG[table]:
                col = _checked(table, column)
                select.append(col)
                names.append(output_name(col))
        if "tMsg" in star_tables:
            include_body = True
            names.append("Body")
    else:
        select = []
        names = []
        for item in ast.select:
            if isinstance(item, CountStar):
                select.append(COUNT_STAR)
                names.append(COUNT_STAR)
            else:
                col = scope.resolve(item)
                select.append(col)
                names.append(output_name(col))

    group_by = tuple(scope.resolve(ref) for ref in ast.group_by)
    has_count = any(item == COUNT_STAR for item in select)

    if group_by and ast.select_star:
        raise QueryError(
            UNSUPPORTED_FEATURE,
            f"unsupported query shape at position {ast.group_by[0].pos}:"
            " SELECT * cannot be combined with GROUP BY",
            ast.group_by[0].pos,
        )
    if group_by:
        for item, ref in zip(select, _select_refs(ast)):
            if item != COUNT_STAR and item not in group_by:
                raise QueryError(
                    UNSUPPORTED_FEATURE,
                    f"unsupported query shape at position {ref.pos}: column"
                    f" '{ref.name}' must appear in GROUP BY",
                    ref.pos,
                )
    elif has_count and any(item != COUNT_STAR for item in select):
        first = next(r for i, r in zip(select, _select_refs(ast)) if i != COUNT_STAR)
        raise QueryError(
            UNSUPPORTED_FEATURE,
            f"unsupported query shape at position {first.pos}: mixing count(*)"
            " with plain columns requires GROUP BY",
            first.pos,
        )

    where = tuple(
        CheckedComparison(
            column=(col := scope.resolve(cmp.column)),
            op=cmp.op,
            value=_type_literal(col, cmp.literal),
        )
        for cmp in ast.where
    )

    order_by: CheckedOrder | None = None
    if ast.order_by is not None:
        if isinstance(ast.order_by.key, CountStar):
            if not group_by and not has_count:
                raise QueryError(
                    UNSUPPORTED_FEATURE,
                    f"unsupported query shape at position {ast.order_by.key.pos}:"
                    " ORDER BY count(*) requires an aggregated query",
                    ast.order_by.key.pos,
                )
            order_by = CheckedOrder(key=COUNT_STAR, descending=ast.order_by.descending)
        else:
            col = scope.resolve(ast.order_by.key)
            if group_by and col not in group_by:
                raise QueryError(
                    UNKNOWN_COLUMN,
                    f"unknown column '{ast.order_by.key.name}' after GROUP BY:"
                    " order by a grouped column or count(*)",
                    ast.order_by.key.pos,
                )
            order_by = CheckedOrder(key=col, descending=ast.order_by.descending)

    return CheckedQuery(
        from_table=from_table,
        join=join,
        select=tuple(select),
        output_names=tuple(names),
        include_body=include_body,
        where=where,
        group_by=group_by,
        order_by=order_by,
        limit=ast.limit,
    )


def _select_refs(ast: QueryAst):
    """Positions of select items, aligned with the checked select list."""
    return list(ast.select)


def parse_msg_conditions(text: str):
    """Parse a bare tMsg filter fragment (``Col = 'x' AND ...``) for CLIs."""
    from ..metastore import Condition
    from .lexer import tokenize
    from .parser import _Parser

    if text.strip() == "":
        return ()
    parser = _Parser(tokenize(text))
    comparisons = [parser._comparison()]
    while parser._eat_keyword("AND"):
        comparisons.append(parser._comparison())
    tok = parser._peek()
    if tok.kind != "EOF":
        parser._fail(tok, "end of filter")
    scope = _Scope(["tMsg"])
    out = []
    for cmp in comparisons:
        col = scope.resolve(cmp.column)
        out.append(
            Condition(field=col.attr, op=cmp.op, value=_type_literal(col, cmp.literal))
        )
    return tuple(out)
