"""SQL-subset front end and executor."""

from .ast import COUNT_STAR, CheckedQuery, QueryAst
from .execute import (
    QueryStats,
    ResultSet,
    execute,
    execute_plan,
    execute_sql,
    finalize,
    merge_partials,
    scan_partition,
)
from .parser import parse
from .plan import Plan, plan
from .validate import CATALOG, validate

__all__ = [
    "CATALOG",
    "COUNT_STAR",
    "CheckedQuery",
    "Plan",
    "QueryAst",
    "QueryStats",
    "ResultSet",
    "execute",
    "execute_plan",
    "execute_sql",
    "finalize",
    "merge_partials",
    "parse",
    "plan",
    "scan_partition",
    "validate",
]
