"""Catalog of the six benchmark queries as operation DAGs.

The queries are given as SQL upstream; the physical shapes below are a
translation that only uses priced operation kinds. Aggregations are preceded
by a Shuffle and HAVING becomes a trailing Filter.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .domain import InvalidArgument, OperationNode, OpKind, QueryPlanDag, WindowSpec

S = OpKind


class WorkloadName(str, enum.Enum):
    LR1S = "LR1S"
    LR1T = "LR1T"
    LR2S = "LR2S"
    CM1S = "CM1S"
    CM1T = "CM1T"
    CM2S = "CM2S"


@dataclass(frozen=True)
class WorkloadSpec:
    name: WorkloadName
    window: WindowSpec
    dag: QueryPlanDag
    row_bytes: tuple[int, int]


LINEAR_ROAD_ROW = (60, 70)
CLUSTER_MONITORING_ROW = (150, 200)


def _chain(*kinds: OpKind) -> QueryPlanDag:
    nodes = [OperationNode(k, (i - 1,) if i else ()) for i, k in enumerate(kinds)]
    return QueryPlanDag(tuple(nodes))


def _self_join() -> QueryPlanDag:
    # Scan feeds both join sides; left branch is node 1, right is node 2
    return QueryPlanDag((
        OperationNode(S.SCAN),
        OperationNode(S.PROJECT, (0,)),
        OperationNode(S.PROJECT, (0,)),
        OperationNode(S.HASH_JOIN, (1, 2)),
        OperationNode(S.PROJECT, (3,)),
    ))


_CATALOG = {
    WorkloadName.LR1S: (WindowSpec(30, 5), _self_join, LINEAR_ROAD_ROW),
    WorkloadName.LR1T: (WindowSpec(30, 0), _self_join, LINEAR_ROAD_ROW),
    WorkloadName.LR2S: (WindowSpec(30, 10),
                        lambda: _chain(S.SCAN, S.PROJECT, S.SHUFFLE, S.HASH_AGGREGATE, S.FILTER),
                        LINEAR_ROAD_ROW),
    WorkloadName.CM1S: (WindowSpec(60, 10),
                        lambda: _chain(S.SCAN, S.PROJECT, S.SHUFFLE, S.HASH_AGGREGATE, S.SORT),
                        CLUSTER_MONITORING_ROW),
    WorkloadName.CM1T: (WindowSpec(60, 0),
                        lambda: _chain(S.SCAN, S.PROJECT, S.SHUFFLE, S.HASH_AGGREGATE, S.SORT),
                        CLUSTER_MONITORING_ROW),
    WorkloadName.CM2S: (WindowSpec(60, 5),
                        lambda: _chain(S.SCAN, S.FILTER, S.SHUFFLE, S.HASH_AGGREGATE),
                        CLUSTER_MONITORING_ROW),
}

ALL_WORKLOADS = tuple(WorkloadName)
SLIDING_WORKLOADS = tuple(w for w in WorkloadName if _CATALOG[w][0].slide_s > 0)
TUMBLING_WORKLOADS = tuple(w for w in WorkloadName if _CATALOG[w][0].slide_s == 0)


def build_workload(name) -> WorkloadSpec:
    try:
        key = WorkloadName(name.upper() if isinstance(name, str) else name)
    except ValueError:
        raise InvalidArgument(f"unknown workload {name!r}") from None
    window, make_dag, row_bytes = _CATALOG[key]
    return WorkloadSpec(key, window, make_dag(), row_bytes)
