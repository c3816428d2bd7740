"""Discrete-event loop over simulated time.

One batch is in flight at a time. Arrivals land on whole seconds; a poll or
trigger at time ``t`` sees every dataset ingested strictly before ``t``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import kernels
from .admission import MAX_DATASETS_PER_BATCH, POLL_INTERVAL_NS, construct_micro_batch, est_max_lat
from .domain import (NS_PER_S, BatchRecord, CostModelState, Dataset, Device, HistoryRow,
                     InvalidArgument, MicroBatch, QueryPlanDag, new_micro_batch)
from .latent import LatentPerfModel, partition_times_ns
from .optimizer import HISTORY_WINDOW, Mailbox, optimize
from .planner import map_all_gpu, map_device, map_static
from .traffic import TrafficSpec, arrivals
from .workloads import WorkloadSpec, build_workload


class Mode(str, enum.Enum):
    LMSTREAM = "lmstream"
    BASELINE = "baseline"
    STATIC_PREF = "static-pref"


ADMISSION_COST_NS = 20_000  # per poll, off the critical path
PLAN_COST_PER_OP_NS = 25_000


@dataclass(frozen=True)
class SimConfig:
    workload: WorkloadSpec
    traffic: TrafficSpec
    mode: Mode = Mode.LMSTREAM
    duration_s: int = 1200
    num_cores: int = 12
    trigger_s: int = 10
    model: LatentPerfModel = field(default_factory=LatentPerfModel)
    opt_latency_ns: int = 0
    horizon_ns: int = POLL_INTERVAL_NS
    history_window: int = HISTORY_WINDOW
    max_datasets: int = MAX_DATASETS_PER_BATCH
    plan_cost_per_op_ns: int = PLAN_COST_PER_OP_NS
    admission_cost_ns: int = ADMISSION_COST_NS

    def __post_init__(self):
        if isinstance(self.workload, str):
            object.__setattr__(self, "workload", build_workload(self.workload))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.duration_s < 0:
            raise InvalidArgument("duration must be >= 0")
        if self.num_cores < 1:
            raise InvalidArgument("num_cores must be >= 1")
        if self.trigger_s <= 0:
            raise InvalidArgument("trigger must be > 0")
        if self.opt_latency_ns < 0 or self.horizon_ns < 0:
            raise InvalidArgument("latencies must be >= 0")
        if self.max_datasets < 1:
            raise InvalidArgument("max_datasets must be >= 1")

    @property
    def polls(self) -> bool:
        return self.mode is not Mode.BASELINE


class DatasetLatency(NamedTuple):
    dataset_id: int
    ingest_ns: int
    latency_ns: int


@dataclass
class SimulationResult:
    config: SimConfig
    records: list[BatchRecord]
    latencies: list[DatasetLatency]
    polls: int
    history: list[HistoryRow]

    @property
    def end_ns(self) -> int:
        return self.records[-1].completion_ns if self.records else 0


def execute_micro_batch(batch: MicroBatch, plan: QueryPlanDag, model: LatentPerfModel,
                        num_cores: int | None = None, *, impl=None):
    """Latent execution of one batch: ``(exec_ns, per-dataset latencies)``.

    The batch's own partitions are used; ``num_cores`` only re-splits when given
    and different. Latencies assume the batch completes right after execution.
    """
    parts = batch.partitions
    if num_cores is not None and num_cores != len(parts):
        parts = new_micro_batch(batch.datasets, num_cores, batch.admit_ns).partitions
    if any(i not in plan.assignment for i in range(len(plan.nodes))):
        raise InvalidArgument("plan is not fully assigned")
    exec_ns = max(partition_times_ns(model, plan, parts, impl=impl))
    done = batch.admit_ns + exec_ns
    return exec_ns, [DatasetLatency(d.id, d.ingest_ns, done - d.ingest_ns) for d in batch.datasets]


def _ceil_grid(t: int, step: int) -> int:
    return -(-t // step) * step


class _Run:
    def __init__(self, config: SimConfig):
        self.cfg = config
        self.window = config.workload.window
        self.arrivals = arrivals(config.traffic, config.duration_s)
        self.ai = 0
        self.buffer: list[Dataset] = []
        self.records: list[BatchRecord] = []
        self.latencies: list[DatasetLatency] = []
        self.history: list[HistoryRow] = []
        self.max_lats: list[int] = []
        self.state = CostModelState()
        self.mailbox = Mailbox()
        self.cum_bytes = 0
        self.cum_proc = 0
        self.polls = 0

    @property
    def avg_thput(self) -> Fraction | None:
        return Fraction(self.cum_bytes * NS_PER_S, self.cum_proc) if self.cum_proc else None

    def absorb(self, t: int) -> None:
        arr = self.arrivals
        while self.ai < len(arr) and arr[self.ai].ingest_ns < t:
            self.buffer.append(arr[self.ai])
            self.ai += 1

    def pending(self) -> bool:
        return self.ai < len(self.arrivals) or bool(self.buffer)

    def plan_for(self, batch: MicroBatch) -> tuple[QueryPlanDag, int]:
        dag = self.cfg.workload.dag
        mode = self.cfg.mode
        if mode is Mode.BASELINE:
            return map_all_gpu(dag), 0
        overhead = self.cfg.plan_cost_per_op_ns * len(dag.nodes)
        if mode is Mode.STATIC_PREF:
            return map_static(dag), overhead
        return map_device(dag, Fraction(batch.total_bytes, self.cfg.num_cores), self.state), overhead

    def execute(self, batch: MicroBatch, est: Fraction | None) -> int:
        cfg = self.cfg
        block = 0
        if cfg.mode is Mode.LMSTREAM:
            block, inf_pt, betas = self.mailbox.take(batch.admit_ns)
            if inf_pt is not None:
                self.state.set_inf_pt(inf_pt)
                self.state.betas = betas
        plan, overhead = self.plan_for(batch)
        exec_ns, lats = execute_micro_batch(batch, plan, cfg.model)
        proc = block + overhead + exec_ns
        max_lat = batch.max_buff_ns + proc
        self.cum_bytes += batch.total_bytes
        self.cum_proc += proc
        thput = self.avg_thput
        self.records.append(BatchRecord(
            index=batch.index, admit_ns=batch.admit_ns, num_datasets=batch.num_datasets,
            batch_bytes=batch.total_bytes, max_buff_ns=batch.max_buff_ns, proc_ns=proc,
            max_lat_ns=max_lat, est_max_lat=est, avg_thput=thput,
            inf_pt_bytes=self.state.inf_pt_bytes, n_cpu_ops=plan.count(Device.CPU),
            n_gpu_ops=plan.count(Device.GPU), plan_overhead_ns=overhead, opt_block_ns=block,
            plan=plan.summary(), dataset_ids=tuple(d.id for d in batch.datasets),
            cap_breach=batch.num_datasets >= cfg.max_datasets))
        shift = block + overhead
        self.latencies.extend(DatasetLatency(d, i, l + shift) for d, i, l in lats)
        self.max_lats.append(max_lat)
        self.history.append(HistoryRow(thput, max_lat, self.state.inf_pt_bytes))
        done = batch.admit_ns + proc
        if cfg.mode is Mode.LMSTREAM:
            inf_pt, betas = optimize(self.history, self.window, cfg.history_window)
            self.mailbox.post(done + cfg.opt_latency_ns, inf_pt, betas)
        return done

    def threshold(self) -> tuple[int, int]:
        if self.window.slide_s > 0:
            return self.window.slide_ns, 1
        return sum(self.max_lats), len(self.max_lats)

    def run_polling(self) -> None:
        step = POLL_INTERVAL_NS
        cfg = self.cfg
        t_free = 0
        while self.pending():
            g = _ceil_grid(t_free, step)
            self.absorb(g)
            if not self.buffer:
                # every poll up to the first one that sees the next arrival is empty
                first = (self.arrivals[self.ai].ingest_ns // step + 1) * step
                self.polls += (first - g) // step
                t_free = first
                continue
            immediate = (not self.records or len(self.buffer) >= cfg.max_datasets
                         or (self.window.tumbling and len(self.max_lats) < 2))
            if immediate:
                self.polls += 1
            else:
                seg_end = (self.arrivals[self.ai].ingest_ns // step * step
                           if self.ai < len(self.arrivals) else -1)
                num, den = self.threshold()
                oldest = min(d.ingest_ns for d in self.buffer)
                total = sum(d.size_bytes for d in self.buffer)
                at, n = kernels.poll_scan(g, seg_end, step, oldest, total, self.cum_bytes,
                                          self.cum_proc, num, den, cfg.horizon_ns)
                self.polls += n
                if at < 0:
                    t_free = seg_end + step
                    continue
                g = at
            decision = construct_micro_batch(
                self.buffer, (), g, self.window, self.avg_thput, self.max_lats, cfg.num_cores,
                index=len(self.records), horizon_ns=cfg.horizon_ns, max_datasets=cfg.max_datasets)
            assert decision.admitted, (g, decision.reason)
            self.buffer = []
            t_free = self.execute(decision.batch, decision.est_max_lat)

    def run_baseline(self) -> None:
        trig = self.cfg.trigger_s * NS_PER_S
        t = 0
        while self.pending():
            self.absorb(t)
            if not self.buffer:
                t = (self.arrivals[self.ai].ingest_ns // trig + 1) * trig
                continue
            thput = self.avg_thput
            est = est_max_lat(self.buffer, t, thput) if thput else None
            batch = new_micro_batch(self.buffer, self.cfg.num_cores, t, len(self.records))
            self.buffer = []
            done = self.execute(batch, est)
            nxt = (t // trig + 1) * trig
            t = done if nxt <= done else nxt


def run_simulation(config: SimConfig) -> SimulationResult:
    run = _Run(config)
    if config.mode is Mode.BASELINE:
        run.run_baseline()
    else:
        run.run_polling()
    return SimulationResult(config, run.records, run.latencies, run.polls, run.history)
