"""Recursive-descent parser for the SQL subset.

Supported shape::

    SELECT <* | item, ...> FROM <table>
        [[JOIN <table>] ON <col> = <col>]
        [WHERE <col> <op> <literal> [AND ...]]
        [GROUP BY <col>, ...]
        [ORDER BY <col | count(*)> [ASC|DESC]]
        [LIMIT <n>] [;]

where item is a column reference or ``count(*)``.  The bare
``FROM a ON a.x = b.y`` form is normalized to an equi-join with the other
table named in the ON condition.  Anything outside the subset raises
UnsupportedFeature naming the offending token; malformed input raises
SyntaxError with a 1-based position.
"""

from __future__ import annotations

from ..errors import BLANK_QUERY, SYNTAX_ERROR, UNSUPPORTED_FEATURE, QueryError
from .ast import (
    ColumnRef,
    Comparison,
    CountStar,
    JoinClause,
    Literal,
    OrderClause,
    QueryAst,
)
from .lexer import Token, tokenize

BLANK_QUERY_MESSAGE = "blank query: statement contains only whitespace"

_UNSUPPORTED = {
    "OR": "OR (only AND conjunctions are supported)",
    "NOT": "NOT",
    "IN": "IN",
    "LIKE": "LIKE",
    "BETWEEN": "BETWEEN",
    "IS": "IS",
    "NULL": "NULL",
    "HAVING": "HAVING",
    "OFFSET": "OFFSET",
    "DISTINCT": "DISTINCT",
    "AS": "column aliases (AS)",
    "UNION": "UNION",
    "EXISTS": "EXISTS",
    "INSERT": "INSERT (only SELECT is supported)",
    "UPDATE": "UPDATE (only SELECT is supported)",
    "DELETE": "DELETE (only SELECT is supported)",
    "CREATE": "CREATE (only SELECT is supported)",
    "DROP": "DROP (only SELECT is supported)",
    "SUM": "aggregate function 'SUM' (only count(*) is supported)",
    "AVG": "aggregate function 'AVG' (only count(*) is supported)",
    "MIN": "aggregate function 'MIN' (only count(*) is supported)",
    "MAX": "aggregate function 'MAX' (only count(*) is supported)",
    "INNER": "join qualifiers (write a bare JOIN)",
    "LEFT": "join qualifiers (write a bare JOIN)",
    "RIGHT": "join qualifiers (write a bare JOIN)",
    "OUTER": "join qualifiers (write a bare JOIN)",
}


def parse(sql: str) -> QueryAst:
    """Parse one statement; blank input is rejected before lexing."""
    if sql.strip() == "":
        raise QueryError(BLANK_QUERY, BLANK_QUERY_MESSAGE)
    return _Parser(tokenize(sql)).parse_query()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._i = 0

    def _peek(self) -> Token:
        return self._tokens[self._i]

    def _next(self) -> Token:
        tok = self._tokens[self._i]
        if tok.kind != "EOF":
            self._i += 1
        return tok

    def _at_keyword(self, word: str) -> bool:
        tok = self._peek()
        return tok.kind == "KEYWORD" and tok.text == word

    def _eat_keyword(self, word: str) -> bool:
        if self._at_keyword(word):
            self._next()
            return True
        return False

    def _fail(self, tok: Token, expected: str):
        if tok.kind == "KEYWORD" and tok.text in _UNSUPPORTED:
            raise QueryError(
                UNSUPPORTED_FEATURE,
                f"unsupported feature at position {tok.pos}: {_UNSUPPORTED[tok.text]}",
                tok.pos,
            )
        if tok.kind == "ARITH":
            raise QueryError(
                UNSUPPORTED_FEATURE,
                f"unsupported feature at position {tok.pos}: arithmetic operator"
                f" '{tok.text}'",
                tok.pos,
            )
        if tok.kind == "LPAREN" and self._i + 1 < len(self._tokens):
            nxt = self._tokens[self._i + 1]
            if nxt.kind == "KEYWORD" and nxt.text == "SELECT":
                raise QueryError(
                    UNSUPPORTED_FEATURE,
                    f"unsupported feature at position {tok.pos}: subqueries",
                    tok.pos,
                )
        found = "end of input" if tok.kind == "EOF" else f"'{tok.text}'"
        raise QueryError(
            SYNTAX_ERROR,
            f"syntax error at position {tok.pos}: expected {expected}, found {found}",
            tok.pos,
        )

    def _expect_keyword(self, word: str, expected: str) -> Token:
        tok = self._peek()
        if tok.kind == "KEYWORD" and tok.text == word:
            return self._next()
        self._fail(tok, expected)

    def _expect(self, kind: str, expected: str) -> Token:
        tok = self._peek()
        if tok.kind == kind:
            return self._next()
        self._fail(tok, expected)

    # -- grammar --------------------------------------------------------

    def parse_query(self) -> QueryAst:
        self._expect_keyword("SELECT", "SELECT")
        select_star, select = self._select_list()
        self._expect_keyword("FROM", "FROM")
        from_tok = self._expect("IDENT", "a table name")
        join = self._join_clause()
        where = self._where_clause()
        group_by = self._group_clause()
        order_by = self._order_clause()
        limit = self._limit_clause()
        self._eat_semi()
        tok = self._peek()
        if tok.kind != "EOF":
            self._fail(tok, "end of statement")
        return QueryAst(
            select_star=select_star,
            select=tuple(select),
            from_table=from_tok.text,
            from_pos=from_tok.pos,
            join=join,
            where=tuple(where),
            group_by=tuple(group_by),
            order_by=order_by,
            limit=limit,
        )

    def _select_list(self):
        if self._peek().kind == "STAR":
            self._next()
            return True, []
        items: list = [self._select_item()]
        while self._peek().kind == "COMMA":
            self._next()
            items.append(self._select_item())
        return False, items

    def _select_item(self):
        tok = self._peek()
        if tok.kind == "KEYWORD" and tok.text == "COUNT":
            return self._count_star()
        if tok.kind == "IDENT":
            return self._column_ref()
        self._fail(tok, "a column name or count(*)")

    def _count_star(self) -> CountStar:
        tok = self._expect_keyword("COUNT", "count(*)")
        self._expect("LPAREN", "'(' after count")
        star = self._peek()
        if star.kind != "STAR":
            if star.kind in ("IDENT", "KEYWORD"):
                raise QueryError(
                    UNSUPPORTED_FEATURE,
                    f"unsupported feature at position {star.pos}: count over an"
                    " expression (only count(*) is supported)",
                    star.pos,
                )
            self._fail(star, "'*'")
        self._next()
        self._expect("RPAREN", "')'")
        return CountStar(pos=tok.pos)

    def _column_ref(self) -> ColumnRef:
        first = self._expect("IDENT", "a column name")
        if self._peek().kind == "LPAREN":
            paren = self._peek()
            raise QueryError(
                UNSUPPORTED_FEATURE,
                f"unsupported feature at position {paren.pos}: function"
                f" '{first.text}' (only count(*) is supported)",
                paren.pos,
            )
        if self._peek().kind == "DOT":
            self._next()
            second = self._expect("IDENT", "a column name after '.'")
            return ColumnRef(table=first.text, name=second.text, pos=first.pos)
        return ColumnRef(table=None, name=first.text, pos=first.pos)

    def _join_clause(self) -> JoinClause | None:
        if self._at_keyword("JOIN"):
            pos = self._next().pos
            table = self._expect("IDENT", "a table name after JOIN")
            self._expect_keyword("ON", "ON")
            left, right = self._join_condition()
            return JoinClause(table=table.text, left=left, right=right, pos=pos)
        if self._at_keyword("ON"):
            pos = self._next().pos
            left, right = self._join_condition()
            return JoinClause(table=None, left=left, right=right, pos=pos)
        return None

    def _join_condition(self) -> tuple[ColumnRef, ColumnRef]:
        left = self._column_ref()
        tok = self._peek()
        if not (tok.kind == "OP" and tok.text == "="):
            self._fail(tok, "'=' in the join condition")
        self._next()
        right = self._column_ref()
        return left, right

    def _where_clause(self) -> list[Comparison]:
        if not self._eat_keyword("WHERE"):
            return []
        comparisons = [self._comparison()]
        while self._eat_keyword("AND"):
            comparisons.append(self._comparison())
        return comparisons

    def _comparison(self) -> Comparison:
        column = self._column_ref()
        tok = self._peek()
        if tok.kind != "OP":
            self._fail(tok, "a comparison operator")
        op = self._next().text
        literal = self._literal()
        return Comparison(column=column, op=op, literal=literal)

    def _literal(self) -> Literal:
        tok = self._peek()
        if tok.kind == "STRING":
            self._next()
            return Literal(kind="str", text=tok.text, value=tok.value, pos=tok.pos)
        if tok.kind == "INT":
            self._next()
            return Literal(kind="int", text=tok.text, value=tok.value, pos=tok.pos)
        self._fail(tok, "a quoted string or integer literal")

    def _group_clause(self) -> list[ColumnRef]:
        if not self._at_keyword("GROUP"):
            return []
        self._next()
        self._expect_keyword("BY", "BY after GROUP")
        columns = [self._column_ref()]
        while self._peek().kind == "COMMA":
            self._next()
            columns.append(self._column_ref())
        return columns

    def _order_clause(self) -> OrderClause | None:
        if not self._at_keyword("ORDER"):
            return None
        self._next()
        self._expect_keyword("BY", "BY after ORDER")
        tok = self._peek()
        key: ColumnRef | CountStar
        if tok.kind == "KEYWORD" and tok.text == "COUNT":
            key = self._count_star()
        else:
            key = self._column_ref()
        descending = False
        if self._at_keyword("DESC"):
            self._next()
            descending = True
        elif self._at_keyword("ASC"):
            self._next()
        return OrderClause(key=key, descending=descending)

    def _limit_clause(self) -> int | None:
        if not self._eat_keyword("LIMIT"):
            return None
        tok = self._peek()
        if tok.kind != "INT" or tok.value < 1:
            self._fail(tok, "a positive integer after LIMIT")
        self._next()
        return tok.value

    def _eat_semi(self) -> None:
        if self._peek().kind == "SEMI":
            self._next()
