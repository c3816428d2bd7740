"""Deterministic simulator of latency-bounded micro-batch scheduling on a
CPU/GPU executor."""
from .domain import (BatchRecord, Dataset, Device, InvalidArgument, MicroBatch, OpKind,
                     OperationNode, QueryPlanDag, WindowSpec)
from .engine import Mode, SimConfig, SimulationResult, execute_micro_batch, run_simulation
from .kernels import BACKEND
from .latent import LatentPerfModel
from .metrics import Summary, summarize
from .workloads import build_workload

__all__ = [
    "BACKEND", "BatchRecord", "Dataset", "Device", "InvalidArgument", "LatentPerfModel",
    "MicroBatch", "Mode", "OpKind", "OperationNode", "QueryPlanDag", "SimConfig",
    "SimulationResult", "Summary", "WindowSpec", "build_workload", "execute_micro_batch",
    "run_simulation", "summarize",
]
