"""Random well-formed query generation over the supported grammar."""

from __future__ import annotations

import random

from cnicloud.logmodel import format_compact_utc

from .reference import OracleData

_STR_COLUMNS = {
    "tMsg": ["MsgType", "Filepath", "MsgPath", "MsgHash"],
    "tFile": ["Carrier", "Phone", "Filepath"],
}


class Vocab:
    """Literal pools sampled from a corpus, plus deliberate misses."""

    def __init__(self, data: OracleData):
        self.values: dict[tuple[str, str], list[str]] = {}
        files = data.files
        msgs = [m for _, m, _ in data.messages]
        self.values[("tFile", "Carrier")] = sorted({f.carrier for f in files}) + ["Nowhere"]
        self.values[("tFile", "Phone")] = sorted({f.phone for f in files}) + ["Brick"]
        self.values[("tFile", "Filepath")] = [f.filepath for f in files][:8] + ["/nope"]
        self.msg_values = {
            "MsgType": sorted({m.msgtype for m in msgs}) + ["5G_NR_RRC"],
            "Filepath": [m.filepath for m in msgs[:60:7]] + ["/nope"],
            "MsgPath": [m.msgpath for m in msgs[:60:7]] + ["/nope"],
            "MsgHash": [m.msghash for m in msgs[:40:5]] + ["0" * 16],
        }
        self.linenos = [m.lineno for m in msgs]
        self.times = [m.time for m in msgs] + [f.time for f in files]

    def literal(self, rnd: random.Random, table: str, column: str) -> str:
        if column == "LineNo":
            pick = rnd.choice(self.linenos + [1, 9999])
            return str(pick) if rnd.random() < 0.8 else f'"{pick}"'
        if column == "Time":
            ms = rnd.choice(self.times)
            roll = rnd.random()
            if roll < 0.5:
                return str(ms)
            if roll < 0.8:
                return f'"{format_compact_utc(ms)}"'
            return f'"{format_compact_utc(ms)[:4]}-{format_compact_utc(ms)[4:6]}-{format_compact_utc(ms)[6:8]}"'
        if table == "tMsg":
            pool = self.msg_values[column]
        else:
            pool = self.values[(table, column)]
        value = rnd.choice(pool)
        quote = "'" if rnd.random() < 0.3 else '"'
        return f"{quote}{value}{quote}"


_OPS = ["=", "=", "=", "!=", "<", "<=", ">", ">="]


def _kw(rnd: random.Random, word: str) -> str:
    roll = rnd.random()
    if roll < 0.7:
        return word
    if roll < 0.85:
        return word.lower()
    return word.capitalize()


def _column(rnd: random.Random, table: str, column: str, qualify: bool) -> str:
    return f"{table}.{column}" if qualify else column


def generate_query(rnd: random.Random, vocab: Vocab) -> str:
    shape = rnd.random()
    join = shape < 0.35
    if join:
        from_table = rnd.choice(["tMsg", "tFile"])
        other = "tFile" if from_table == "tMsg" else "tMsg"
        if rnd.random() < 0.5:
            join_sql = f" ON {from_table}.Filepath = {other}.Filepath"
        else:
            join_sql = (
                f" {_kw(rnd, 'JOIN')} {other} ON {from_table}.Filepath ="
                f" {other}.Filepath"
            )
        scope = ["tMsg", "tFile"]
    else:
        from_table = rnd.choice(["tMsg", "tMsg", "tMsg", "tFile"])
        join_sql = ""
        scope = [from_table]

    def scope_columns():
        out = []
        for table in scope:
            for column in _STR_COLUMNS[table] + (
                ["LineNo", "Time"] if table == "tMsg" else ["Time"]
            ):
                out.append((table, column))
        return out

    columns = scope_columns()
    # Ambiguous bare names need qualification when both tables are in scope.
    def render_col(table, column):
        ambiguous = join and column in ("Filepath", "Time")
        return _column(rnd, table, column, qualify=ambiguous or rnd.random() < 0.4)

    where_sql = ""
    n_conds = rnd.choice([0, 1, 1, 2, 3])
    if n_conds:
        conds = []
        for _ in range(n_conds):
            table, column = rnd.choice(columns)
            conds.append(
                f"{render_col(table, column)} {rnd.choice(_OPS)}"
                f" {vocab.literal(rnd, table, column)}"
            )
        where_sql = f" {_kw(rnd, 'WHERE')} " + f" {_kw(rnd, 'AND')} ".join(conds)

    kind = rnd.random()
    order_sql = ""
    limit_sql = ""
    if kind < 0.30:  # star
        select_sql = "*"
        group_sql = ""
        if rnd.random() < 0.4:
            table, column = rnd.choice(columns)
            direction = rnd.choice(["", " ASC", " DESC"])
            order_sql = f" {_kw(rnd, 'ORDER')} BY {render_col(table, column)}{direction}"
    elif kind < 0.50:  # plain projection
        picked = rnd.sample(columns, k=rnd.randint(1, min(3, len(columns))))
        select_sql = ", ".join(render_col(t, c) for t, c in picked)
        group_sql = ""
        if rnd.random() < 0.4:
            table, column = rnd.choice(columns)
            direction = rnd.choice(["", " ASC", " DESC"])
            order_sql = f" ORDER BY {render_col(table, column)}{direction}"
    elif kind < 0.62:  # bare count
        select_sql = _kw(rnd, "COUNT") + "(*)"
        group_sql = ""
    else:  # group by
        n_keys = rnd.choice([1, 1, 1, 2])
        keys = rnd.sample(columns, k=n_keys)
        items = [render_col(t, c) for t, c in keys]
        if rnd.random() < 0.85:
            items.append("count(*)")
            rnd.shuffle(items)
        select_sql = ", ".join(items)
        group_sql = f" {_kw(rnd, 'GROUP')} BY " + ", ".join(
            render_col(t, c) for t, c in keys
        )
        if rnd.random() < 0.5:
            direction = rnd.choice(["", " ASC", " DESC"])
            if rnd.random() < 0.5:
                order_sql = f" ORDER BY count(*){direction}"
            else:
                t, c = rnd.choice(keys)
                order_sql = f" ORDER BY {render_col(t, c)}{direction}"
    if rnd.random() < 0.3:
        limit_sql = f" {_kw(rnd, 'LIMIT')} {rnd.randint(1, 40)}"
    semi = ";" if rnd.random() < 0.3 else ""
    return (
        f"{_kw(rnd, 'SELECT')} {select_sql} {_kw(rnd, 'FROM')} {from_table}"
        f"{join_sql}{where_sql}{group_sql}{order_sql}{limit_sql}{semi}"
    )


def generate_queries(seed: int, vocab: Vocab, n: int) -> list[str]:
    rnd = random.Random(seed)
    return [generate_query(rnd, vocab) for _ in range(n)]
