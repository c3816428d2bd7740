"""Operation-level CPU/GPU mapping driven by the inflection point.

Costs are dimensionless and only ever compared with each other; they are
never converted to seconds. All arithmetic is exact (Fraction) so ties are
real ties.
"""
from __future__ import annotations

from fractions import Fraction

from .domain import (INITIAL_PREFERENCE, CostModelState, Device, InvalidArgument,
                     QueryPlanDag)


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _check(*values) -> None:
    for v in values:
        if v <= 0:
            raise InvalidArgument(f"cost inputs must be positive, got {v}")


def cpu_cost(base_cost, part_bytes, inf_pt_bytes) -> Fraction:
    _check(base_cost, part_bytes, inf_pt_bytes)
    return _q(base_cost) * _q(part_bytes) / _q(inf_pt_bytes)


def gpu_cost(base_cost, part_bytes, inf_pt_bytes) -> Fraction:
    _check(base_cost, part_bytes, inf_pt_bytes)
    return _q(base_cost) * _q(inf_pt_bytes) / _q(part_bytes)


def trans_cost(base_trans_cost, part_bytes, inf_pt_bytes) -> Fraction:
    _check(base_trans_cost, part_bytes, inf_pt_bytes)
    return _q(base_trans_cost) * _q(part_bytes) / _q(inf_pt_bytes)


def map_device(dag: QueryPlanDag, part_bytes, state: CostModelState) -> QueryPlanDag:
    """Greedy children-first device mapping.

    Every operation starts on the GPU. Visiting in traversal order, the
    transition cost is charged to the GPU side for sources, the sink, and any
    operation with a CPU-resident input; otherwise to the CPU side. An
    operation moves to the CPU only when its GPU cost is strictly larger.
    """
    _check(part_bytes)
    order = dag.traverse()
    root = dag.root()
    assignment = {i: Device.GPU for i in order}
    inf_pt = state.inf_pt_bytes
    for o in order:
        node = dag.nodes[o]
        cpu = cpu_cost(node.base_cost, part_bytes, inf_pt)
        gpu = gpu_cost(node.base_cost, part_bytes, inf_pt)
        trans = trans_cost(state.base_trans_cost, part_bytes, inf_pt)
        first = not node.predecessors
        cpu_input = any(assignment[p] is Device.CPU for p in node.predecessors)
        if first or o == root or cpu_input:
            gpu += trans
        else:
            cpu += trans
        if gpu > cpu:
            assignment[o] = Device.CPU
    return dag.with_assignment(assignment)


def map_static(dag: QueryPlanDag) -> QueryPlanDag:
    """Size-blind mapping from the initial preference table; Neutral goes to the GPU."""
    dag.traverse()  # validates acyclicity
    assignment = {
        i: Device.CPU if INITIAL_PREFERENCE[n.op_kind] == "CPU" else Device.GPU
        for i, n in enumerate(dag.nodes)
    }
    return dag.with_assignment(assignment)


def map_all_gpu(dag: QueryPlanDag) -> QueryPlanDag:
    dag.traverse()
    return dag.with_assignment({i: Device.GPU for i in range(len(dag.nodes))})
