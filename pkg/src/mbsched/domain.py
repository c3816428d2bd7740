"""Core value types shared by every module.

Simulated time is fixed-point: integer nanoseconds everywhere inside the
engine. Seconds only appear at the edges (CSV/JSON output, CLI flags).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

NS_PER_S = 1_000_000_000
KB = 1_000
MB = 1_000_000
GB = 1_000_000_000
KIB = 1_024
MIB = 1_024 * 1_024

INF_PT_MIN = 1 * KIB
INF_PT_MAX = 16 * MIB
INITIAL_INF_PT = 150 * KB
INITIAL_BASE_TRANS_COST = Fraction(1, 10)


class InvalidArgument(ValueError):
    pass


def seconds_to_ns(value) -> int:
    """Convert seconds (int, str, Fraction or float) to integer nanoseconds.

    Strings and Fractions are converted exactly; floats go through their
    shortest repr so ``0.01`` becomes exactly 10 ms.
    """
    if isinstance(value, float):
        value = repr(value)
    frac = Fraction(value) * NS_PER_S
    if frac.denominator != 1:
        frac = Fraction(round(frac))
    return int(frac)


def ns_to_str(ns: int) -> str:
    """Exact decimal seconds with nine fractional digits."""
    sign = "-" if ns < 0 else ""
    whole, frac = divmod(abs(ns), NS_PER_S)
    return f"{sign}{whole}.{frac:09d}"


def str_to_ns(text: str) -> int:
    """Inverse of :func:`ns_to_str`; exact for any decimal string."""
    return int(Fraction(text) * NS_PER_S)


def clamp_inf_pt(value) -> int:
    v = round(value)
    return int(min(max(v, INF_PT_MIN), INF_PT_MAX))


class Device(str, enum.Enum):
    CPU = "CPU"
    GPU = "GPU"


class OpKind(str, enum.Enum):
    SCAN = "Scan"
    FILTER = "Filter"
    PROJECT = "Project"
    HASH_AGGREGATE = "HashAggregate"
    HASH_JOIN = "HashJoin"
    SORT = "Sort"
    SHUFFLE = "Shuffle"
    EXPAND = "Expand"


# base cost and the device an operation prefers near the inflection point
BASE_COST = {
    OpKind.HASH_AGGREGATE: Fraction(1),
    OpKind.FILTER: Fraction(1),
    OpKind.SHUFFLE: Fraction(1),
    OpKind.PROJECT: Fraction(9, 10),
    OpKind.HASH_JOIN: Fraction(9, 10),
    OpKind.EXPAND: Fraction(9, 10),
    OpKind.SCAN: Fraction(4, 5),
    OpKind.SORT: Fraction(4, 5),
}

INITIAL_PREFERENCE = {
    OpKind.HASH_AGGREGATE: "CPU",
    OpKind.FILTER: "CPU",
    OpKind.SHUFFLE: "CPU",
    OpKind.PROJECT: "Neutral",
    OpKind.HASH_JOIN: "Neutral",
    OpKind.EXPAND: "Neutral",
    OpKind.SCAN: "GPU",
    OpKind.SORT: "GPU",
}


@dataclass(frozen=True, slots=True)
class Dataset:
    id: int
    size_bytes: int
    ingest_ns: int

    def __post_init__(self):
        if self.size_bytes <= 0:
            raise InvalidArgument(f"dataset {self.id}: size_bytes must be > 0")
        if self.ingest_ns < 0:
            raise InvalidArgument(f"dataset {self.id}: negative ingest time")

    @property
    def ingest_time(self) -> Fraction:
        return Fraction(self.ingest_ns, NS_PER_S)


@dataclass(frozen=True, slots=True)
class WindowSpec:
    range_s: int
    slide_s: int

    def __post_init__(self):
        if self.range_s <= 0:
            raise InvalidArgument("window range must be > 0")
        if self.slide_s < 0 or self.slide_s > self.range_s:
            raise InvalidArgument("window slide must lie in [0, range]")

    @property
    def tumbling(self) -> bool:
        return self.slide_s == 0

    @property
    def slide_ns(self) -> int:
        return self.slide_s * NS_PER_S


def split_partitions(total_bytes: int, num_cores: int) -> list[int]:
    """Near-equal byte split; the first ``total % num_cores`` get one extra byte."""
    q, r = divmod(total_bytes, num_cores)
    return [q + 1] * r + [q] * (num_cores - r)


@dataclass(frozen=True, slots=True)
class MicroBatch:
    index: int
    datasets: tuple[Dataset, ...]
    admit_ns: int
    partitions: tuple[int, ...]

    @property
    def num_datasets(self) -> int:
        return len(self.datasets)

    @property
    def total_bytes(self) -> int:
        return sum(d.size_bytes for d in self.datasets)

    @property
    def max_buff_ns(self) -> int:
        return self.admit_ns - min(d.ingest_ns for d in self.datasets)


def new_micro_batch(datasets: Sequence[Dataset], num_cores: int, admit_ns: int,
                    index: int = 0) -> MicroBatch:
    if not datasets:
        raise InvalidArgument("a micro-batch needs at least one dataset")
    if num_cores < 1:
        raise InvalidArgument("num_cores must be >= 1")
    ordered = tuple(sorted(datasets, key=lambda d: (d.ingest_ns, d.id)))
    total = sum(d.size_bytes for d in ordered)
    return MicroBatch(index, ordered, admit_ns, tuple(split_partitions(total, num_cores)))


@dataclass(frozen=True, slots=True)
class OperationNode:
    op_kind: OpKind
    predecessors: tuple[int, ...] = ()
    base_cost: Fraction | None = None

    def __post_init__(self):
        if self.base_cost is None:
            object.__setattr__(self, "base_cost", BASE_COST[self.op_kind])
        if self.base_cost <= 0:
            raise InvalidArgument("base_cost must be positive")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class QueryPlanDag:
    nodes: tuple[OperationNode, ...]
    assignment: dict[int, Device] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.nodes)
        for i, node in enumerate(self.nodes):
            for p in node.predecessors:
                if not 0 <= p < n or p == i:
                    raise PlanError(f"node {i}: bad predecessor {p}")

    def leaves(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if not n.predecessors]

    def root(self) -> int:
        used = {p for n in self.nodes for p in n.predecessors}
        roots = [i for i in range(len(self.nodes)) if i not in used]
        if len(roots) != 1:
            raise PlanError(f"expected exactly one root, found {roots}")
        return roots[0]

    def traverse(self) -> list[int]:
        """Children-first order: post-order DFS from the root, predecessors
        visited left to right. Raises PlanError on a cycle."""
        order: list[int] = []
        state = [0] * len(self.nodes)  # 0 new, 1 on stack, 2 done

        def visit(i: int) -> None:
            if state[i] == 2:
                return
            if state[i] == 1:
                raise PlanError(f"cycle through node {i}")
            state[i] = 1
            for p in self.nodes[i].predecessors:
                visit(p)
            state[i] = 2
            order.append(i)

        visit(self.root())
        if len(order) != len(self.nodes):
            raise PlanError("plan has nodes unreachable from the root")
        return order

    def with_assignment(self, assignment: dict[int, Device]) -> "QueryPlanDag":
        return QueryPlanDag(self.nodes, dict(assignment))

    def summary(self) -> str:
        return ";".join(f"{self.nodes[i].op_kind.value}:{self.assignment[i].value}"
                        for i in self.traverse())

    def count(self, device: Device) -> int:
        return sum(1 for d in self.assignment.values() if d is device)


@dataclass
class HistoryRow:
    avg_thput: Fraction  # bytes/s
    max_lat_ns: int
    inf_pt_used: int


@dataclass
class CostModelState:
    inf_pt_bytes: int = INITIAL_INF_PT
    base_trans_cost: Fraction = INITIAL_BASE_TRANS_COST
    history: list[HistoryRow] = field(default_factory=list)
    betas: object | None = None

    def __post_init__(self):
        self.inf_pt_bytes = clamp_inf_pt(self.inf_pt_bytes)

    def set_inf_pt(self, value) -> None:
        self.inf_pt_bytes = clamp_inf_pt(value)


@dataclass
class BatchRecord:
    index: int
    admit_ns: int
    num_datasets: int
    batch_bytes: int
    max_buff_ns: int
    proc_ns: int
    max_lat_ns: int
    est_max_lat: Fraction | None  # seconds; None before any throughput exists
    avg_thput: Fraction  # bytes/s, cumulative
    inf_pt_bytes: int
    n_cpu_ops: int
    n_gpu_ops: int
    plan_overhead_ns: int
    opt_block_ns: int
    # not part of the CSV schema
    plan: str = ""
    dataset_ids: tuple[int, ...] = ()
    cap_breach: bool = False

    @property
    def completion_ns(self) -> int:
        return self.admit_ns + self.proc_ns

    @property
    def exec_ns(self) -> int:
        return self.proc_ns - self.plan_overhead_ns - self.opt_block_ns
