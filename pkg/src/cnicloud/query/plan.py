"""Physical planning.

A plan is a fixed operator pipeline: partition scan with pushed-down
filters, optional broadcast hash join (tFile is always the build side, tMsg
the probe side), optional hash aggregation, deterministic sort, limit, and
for ``SELECT *`` over tMsg a final lazy body-resolution step.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..metastore import Condition
from .ast import COUNT_STAR, CheckedColumn, CheckedOrder, CheckedQuery


@dataclass(frozen=True)
class Plan:
    scan_table: str  # "tMsg" | "tFile"
    scan_conditions: tuple[Condition, ...]
    join_build: bool  # broadcast hash join building on tFile
    build_conditions: tuple[Condition, ...]
    aggregate: bool
    group_by: tuple[CheckedColumn, ...]
    select: tuple[CheckedColumn | str, ...]  # CheckedColumn or COUNT_STAR
    output_names: tuple[str, ...]
    include_body: bool
    order_by: CheckedOrder | None
    limit: int | None


def plan(checked: CheckedQuery) -> Plan:
    """Lower a checked query; single-table predicates are pushed to the scan."""
    if checked.join:
        scan_table = "tMsg"  # probe side; tFile is always the build side
        scan_conds = tuple(
            _condition(c) for c in checked.where if c.column.table == "tMsg"
        )
        build_conds = tuple(
            _condition(c) for c in checked.where if c.column.table == "tFile"
        )
    else:
        scan_table = checked.from_table
        scan_conds = tuple(_condition(c) for c in checked.where)
        build_conds = ()
    aggregate = bool(checked.group_by) or any(
        item == COUNT_STAR for item in checked.select
    )
    return Plan(
        scan_table=scan_table,
        scan_conditions=scan_conds,
        join_build=checked.join,
        build_conditions=build_conds,
        aggregate=aggregate,
        group_by=checked.group_by,
        select=checked.select,
        output_names=checked.output_names,
        include_body=checked.include_body,
        order_by=checked.order_by,
        limit=checked.limit,
    )


def _condition(cmp) -> Condition:
    return Condition(field=cmp.column.attr, op=cmp.op, value=cmp.value)
