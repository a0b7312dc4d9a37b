"""Hand-written lexer for the SQL subset.

Token positions are 1-based character offsets into the original statement;
they surface in error messages, which must stay byte-stable for identical
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SYNTAX_ERROR, QueryError

KEYWORDS = {
    "SELECT",
    "FROM",
    "WHERE",
    "AND",
    "GROUP",
    "BY",
    "ORDER",
    "LIMIT",
    "ON",
    "JOIN",
    "COUNT",
    "ASC",
    "DESC",
    # Recognized so they can be rejected as UnsupportedFeature by name.
    "OR",
    "NOT",
    "IN",
    "LIKE",
    "BETWEEN",
    "IS",
    "NULL",
    "HAVING",
    "OFFSET",
    "DISTINCT",
    "AS",
    "UNION",
    "EXISTS",
    "INSERT",
    "UPDATE",
    "DELETE",
    "CREATE",
    "DROP",
    "SUM",
    "AVG",
    "MIN",
    "MAX",
    "INNER",
    "LEFT",
    "RIGHT",
    "OUTER",
}

_SYMBOLS = {
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ".": "DOT",
    ";": "SEMI",
    "*": "STAR",
}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # KEYWORD IDENT STRING INT STAR LPAREN RPAREN COMMA DOT SEMI OP ARITH EOF
    text: str
    value: str | int | None
    pos: int  # 1-based offset


def tokenize(sql: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(sql)
    while i < n:
        ch = sql[i]
        pos = i + 1
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(Token(_SYMBOLS[ch], ch, None, pos))
            i += 1
            continue
        if ch in "'\"":
            end = sql.find(ch, i + 1)
            if end < 0:
                raise QueryError(
                    SYNTAX_ERROR,
                    f"syntax error at position {pos}: unterminated string literal",
                    pos,
                )
            tokens.append(Token("STRING", sql[i : end + 1], sql[i + 1 : end], pos))
            i = end + 1
            continue
        if ch in "!<>=":
            two = sql[i : i + 2]
            if two in ("!=", "<=", ">="):
                tokens.append(Token("OP", two, None, pos))
                i += 2
                continue
            if ch == "!":
                raise QueryError(
                    SYNTAX_ERROR,
                    f"syntax error at position {pos}: unexpected character '!'",
                    pos,
                )
            tokens.append(Token("OP", ch, None, pos))
            i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and sql[i + 1].isdigit()):
            j = i + 1
            while j < n and sql[j].isdigit():
                j += 1
            tokens.append(Token("INT", sql[i:j], int(sql[i:j]), pos))
            i = j
            continue
        if ch in "+-/%":
            tokens.append(Token("ARITH", ch, None, pos))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (sql[j].isalnum() or sql[j] == "_"):
                j += 1
            text = sql[i:j]
            upper = text.upper()
            if upper in KEYWORDS:
                tokens.append(Token("KEYWORD", upper, text, pos))
            else:
                tokens.append(Token("IDENT", text, None, pos))
            i = j
            continue
        raise QueryError(
            SYNTAX_ERROR,
            f"syntax error at position {pos}: unexpected character {ch!r}",
            pos,
        )
    tokens.append(Token("EOF", "", None, n + 1))
    return tokens
