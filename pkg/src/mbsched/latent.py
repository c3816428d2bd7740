"""Ground-truth timing model standing in for a physical CPU/GPU executor.

The planner never sees these numbers. It only reasons with the ordinal
inflection-point costs, and this model decides how long a plan actually takes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .domain import GB, MB, NS_PER_S, Device, InvalidArgument, OpKind, QueryPlanDag, BASE_COST


@dataclass(frozen=True)
class LatentPerfModel:
    cpu_rate: int = 100 * MB  # bytes/s per core
    gpu_rate: int = 2 * GB  # bytes/s
    gpu_kernel_overhead_ns: int = 1_400_000
    pcie_bandwidth: int = 10 * GB  # bytes/s
    pcie_latency_ns: int = 10_000

    def __post_init__(self):
        for name in ("cpu_rate", "gpu_rate", "gpu_kernel_overhead_ns", "pcie_bandwidth",
                     "pcie_latency_ns"):
            if getattr(self, name) <= 0:
                raise InvalidArgument(f"{name} must be positive")


def latent_op_time(model: LatentPerfModel, op_kind: OpKind, device: Device, part_bytes) -> Fraction:
    """Exact seconds for one operation over one partition."""
    if part_bytes <= 0:
        raise InvalidArgument("part_bytes must be positive")
    w = BASE_COST[OpKind(op_kind)]
    if Device(device) is Device.CPU:
        return w * Fraction(part_bytes) / model.cpu_rate
    return (Fraction(model.gpu_kernel_overhead_ns, NS_PER_S)
            + w * Fraction(part_bytes) / model.gpu_rate)


def latent_pcie_time(model: LatentPerfModel, part_bytes) -> Fraction:
    return Fraction(model.pcie_latency_ns, NS_PER_S) + Fraction(part_bytes) / model.pcie_bandwidth


def count_transfers(plan: QueryPlanDag) -> int:
    """Host/device copies per partition: every edge whose endpoints sit on
    different devices, plus ingress for GPU sources and egress for a GPU sink."""
    a = plan.assignment
    n = 0
    for i, node in enumerate(plan.nodes):
        if not node.predecessors and a[i] is Device.GPU:
            n += 1
        n += sum(1 for p in node.predecessors if a[p] is not a[i])
    if a[plan.root()] is Device.GPU:
        n += 1
    return n


def plan_kernel_args(plan: QueryPlanDag):
    order = plan.traverse()
    w_num = [plan.nodes[i].base_cost.numerator for i in order]
    w_den = [plan.nodes[i].base_cost.denominator for i in order]
    devices = [1 if plan.assignment[i] is Device.GPU else 0 for i in order]
    return w_num, w_den, devices, count_transfers(plan)


def partition_times_ns(model: LatentPerfModel, plan: QueryPlanDag, parts, impl=None) -> list[int]:
    w_num, w_den, devices, n_tr = plan_kernel_args(plan)
    return kernels.partition_times(list(parts), w_num, w_den, devices, n_tr, model.cpu_rate,
                                   model.gpu_rate, model.gpu_kernel_overhead_ns,
                                   model.pcie_bandwidth, model.pcie_latency_ns, impl=impl)


def crossover_bytes(model: LatentPerfModel, base_cost=1) -> Fraction:
    """Partition size where one op costs the same on either device (closed form)."""
    w = Fraction(base_cost)
    overhead = Fraction(model.gpu_kernel_overhead_ns, NS_PER_S)
    return overhead / (w / model.cpu_rate - w / model.gpu_rate)


def capacity_bps(model: LatentPerfModel, plan: QueryPlanDag, num_cores: int) -> Fraction:
    """Asymptotic bytes/s of a plan on ``num_cores`` partitions, ignoring the
    fixed per-op and per-transfer latencies."""
    per_byte = Fraction(0)
    for node, i in ((plan.nodes[i], i) for i in range(len(plan.nodes))):
        rate = model.gpu_rate if plan.assignment[i] is Device.GPU else model.cpu_rate
        per_byte += node.base_cost / rate
    per_byte += Fraction(count_transfers(plan), model.pcie_bandwidth)
    return num_cores / per_byte
