"""Run-level aggregates and a phase breakdown of the simulated timeline.

Everything is computed from values that survive a CSV round trip exactly
(integer ns and byte counts), so a summary rebuilt from files on disk is
equal to the in-memory one.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from .admission import POLL_INTERVAL_NS
from .domain import NS_PER_S, BatchRecord, InvalidArgument

WARMUP_BATCHES = 10
PHASES = ("buffering", "admission", "planning", "processing", "opt_block", "idle")


@dataclass(frozen=True)
class Summary:
    num_batches: int
    num_datasets: int
    total_bytes: int
    span_s: Fraction
    avg_latency_s: Fraction
    final_avg_thput_bps: Fraction
    p99_max_lat_s: Fraction
    mean_proc_s: Fraction
    bounded_fraction: Fraction | None
    cap_breaches: int
    polls: int
    phase_pct: dict[str, Fraction]

    def to_json(self) -> dict:
        """Plain-JSON view; fractions become floats."""
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, dict):
                out[k] = {p: float(x) for p, x in v.items()}
            elif isinstance(v, Fraction):
                out[k] = float(v)
            else:
                out[k] = v
        return out


def nearest_rank(values: Sequence[int], pct: int) -> int:
    ordered = sorted(values)
    rank = max(1, -(-pct * len(ordered) // 100))
    return ordered[rank - 1]


def bounded_fraction(records: Sequence[BatchRecord], slide_s: int,
                     warmup: int = WARMUP_BATCHES) -> Fraction | None:
    """Share of post-warm-up batches whose MaxLat stays under the slide."""
    post = records[warmup:]
    if not slide_s or not post:
        return None
    limit = slide_s * NS_PER_S
    return Fraction(sum(1 for r in post if r.max_lat_ns < limit), len(post))


def _grid_count(lo: int, hi: int, step: int) -> int:
    """Grid points in [lo, hi]."""
    if hi < lo:
        return 0
    return hi // step - (-(-lo // step)) + 1


def summarize(records: Sequence[BatchRecord], latencies: Sequence, *, slide_s: int = 0,
              polling: bool = True, admission_cost_ns: int = 20_000,
              poll_interval_ns: int = POLL_INTERVAL_NS,
              warmup: int = WARMUP_BATCHES, max_datasets: int = 4096) -> Summary:
    """Aggregate a run.

    ``latencies`` holds ``(dataset_id, ingest_ns, latency_ns)`` triples. Polls
    are reconstructed as the grid points between one completion and the next
    admission; their cost overlaps buffering when the batch already holds
    data and idle time otherwise.
    """
    if not records or not latencies:
        raise InvalidArgument("summarize needs at least one record and one dataset")
    span = records[-1].admit_ns + records[-1].proc_ns
    buffering = admission = polls = 0
    prev_done = 0
    for r in records:
        oldest = r.admit_ns - r.max_buff_ns
        start = max(prev_done, oldest)
        buff = r.admit_ns - start
        if polling:
            n = _grid_count(prev_done, r.admit_ns, poll_interval_ns)
            busy = _grid_count(max(prev_done, oldest + 1), r.admit_ns, poll_interval_ns)
            polls += n
            carved = min(buff, busy * admission_cost_ns)
            buff -= carved
            admission += n * admission_cost_ns
        buffering += buff
        prev_done = r.admit_ns + r.proc_ns
    planning = sum(r.plan_overhead_ns for r in records)
    opt_block = sum(r.opt_block_ns for r in records)
    processing = sum(r.proc_ns - r.plan_overhead_ns - r.opt_block_ns for r in records)
    idle = span - buffering - admission - planning - processing - opt_block
    parts = dict(zip(PHASES, (buffering, admission, planning, processing, opt_block, idle)))
    pct = {k: Fraction(100 * v, span) if span else Fraction(0) for k, v in parts.items()}

    total_bytes = sum(r.batch_bytes for r in records)
    total_proc = sum(r.proc_ns for r in records)
    lat_sum = sum(l[2] for l in latencies)
    return Summary(
        num_batches=len(records),
        num_datasets=len(latencies),
        total_bytes=total_bytes,
        span_s=Fraction(span, NS_PER_S),
        avg_latency_s=Fraction(lat_sum, len(latencies) * NS_PER_S),
        final_avg_thput_bps=Fraction(total_bytes * NS_PER_S, total_proc) if total_proc else Fraction(0),
        p99_max_lat_s=Fraction(nearest_rank([r.max_lat_ns for r in records], 99), NS_PER_S),
        mean_proc_s=Fraction(total_proc, len(records) * NS_PER_S),
        bounded_fraction=bounded_fraction(records, slide_s, warmup),
        cap_breaches=sum(1 for r in records if r.num_datasets >= max_datasets),
        polls=polls,
        phase_pct=pct,
    )
