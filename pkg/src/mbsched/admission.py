"""Micro-batch admission control.

``construct_micro_batch`` is the per-poll decision. The engine does not call
it on every 10 ms poll; it uses :func:`mbsched.kernels.poll_scan`, which
evaluates the same predicate in exact integer arithmetic, and then calls
``construct_micro_batch`` on the poll that admits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .domain import NS_PER_S, Dataset, InvalidArgument, MicroBatch, WindowSpec, new_micro_batch

MAX_DATASETS_PER_BATCH = 4096
POLL_INTERVAL_NS = 10_000_000


class BootstrapRequired(ValueError):
    """No throughput history yet, so the latency estimate is undefined."""


@dataclass(frozen=True)
class AdmissionDecision:
    admitted: bool
    batch: MicroBatch | None = None
    carried: tuple[Dataset, ...] = ()
    est_max_lat: Fraction | None = None
    reason: str = ""


def est_max_lat(tmp: Sequence[Dataset], now_ns: int, avg_thput_prev) -> Fraction:
    """Estimated max latency in seconds: oldest buffering time plus the
    time to push all bytes through at the previous cumulative throughput."""
    if not tmp:
        raise InvalidArgument("empty dataset list")
    if avg_thput_prev is None or avg_thput_prev <= 0:
        raise BootstrapRequired("no previous throughput")
    max_buff = now_ns - min(d.ingest_ns for d in tmp)
    total = sum(d.size_bytes for d in tmp)
    return Fraction(max_buff, NS_PER_S) + Fraction(total) / Fraction(avg_thput_prev)


def latency_target(window: WindowSpec, max_lat_history_ns: Sequence[int]) -> Fraction | None:
    """Seconds the estimate is compared against; None means admit at once."""
    if window.slide_s > 0:
        return Fraction(window.slide_s)
    if len(max_lat_history_ns) < 2:
        return None
    return Fraction(sum(max_lat_history_ns), len(max_lat_history_ns) * NS_PER_S)


def construct_micro_batch(buffered: Sequence[Dataset], new_files: Sequence[Dataset],
                          now_ns: int, window: WindowSpec, avg_thput_prev,
                          max_lat_history_ns: Sequence[int], num_cores: int,
                          *, index: int = 0, horizon_ns: int = 0,
                          max_datasets: int = MAX_DATASETS_PER_BATCH) -> AdmissionDecision:
    """Admit or cancel the buffered plus new datasets at poll time ``now_ns``.

    ``horizon_ns`` shifts the buffering term forward: with the default engine
    setting of one poll interval the batch is admitted at the last poll that
    can still meet the target instead of the first poll past it.
    """
    if not buffered and not new_files:
        return AdmissionDecision(False, reason="poll")
    tmp = sorted([*buffered, *new_files], key=lambda d: (d.ingest_ns, d.id))

    def admit(reason, est=None):
        batch = new_micro_batch(tmp, num_cores, now_ns, index)
        return AdmissionDecision(True, batch, (), est, reason)

    if not max_lat_history_ns or avg_thput_prev is None:
        return admit("bootstrap")
    est = est_max_lat(tmp, now_ns, avg_thput_prev)
    if len(tmp) >= max_datasets:
        return admit("cap", est)
    target = latency_target(window, max_lat_history_ns)
    if target is None:
        return admit("bootstrap", est)
    if est + Fraction(horizon_ns, NS_PER_S) >= target:
        return admit("threshold", est)
    return AdmissionDecision(False, None, tuple(tmp), est, "buffer")
