"""Backend selection for the hot loops.

The compiled extension is used when it was built and ``MBSCHED_PURE_PYTHON``
is unset. Calls whose operands could overflow 128-bit intermediates are
routed to the Python implementation, which uses unbounded ints.
"""
from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("MBSCHED_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

_I64 = 2**63 - 1
_BITS = 125


def _fits(*xs) -> bool:
    return all(-_I64 <= x <= _I64 for x in xs)


def poll_scan(t0, t_end, step, oldest_ns, total_bytes, cum_bytes, cum_proc_ns,
              thr_num, thr_den, horizon_ns, *, impl=None):
    """First admitting poll time in ``[t0, t_end]`` and the number of polls made.

    ``t_end < 0`` means unbounded; the scan is then capped at the poll where the
    buffering term alone reaches the threshold, which always admits.
    """
    if step <= 0 or cum_bytes <= 0 or thr_den <= 0:
        raise ValueError("step, cum_bytes and thr_den must be positive")
    if t_end < 0:
        bound = oldest_ns - horizon_ns - (-thr_num // thr_den)
        t_end = t0 + max(0, -(-(bound - t0) // step)) * step
    args = (t0, t_end, step, oldest_ns, total_bytes, cum_bytes, cum_proc_ns,
            thr_num, thr_den, horizon_ns)
    mod = impl or (_ckernels if _ckernels is not None else _pykernels)
    if mod is _ckernels:
        span = max(abs(t0 + horizon_ns - oldest_ns), abs(t_end + horizon_ns - oldest_ns))
        ok = (_fits(*args, t_end + step)
              and span.bit_length() + cum_bytes.bit_length() + 1 + thr_den.bit_length() <= _BITS
              and (total_bytes * cum_proc_ns).bit_length() + 1 + thr_den.bit_length() <= _BITS
              and (thr_num * cum_bytes).bit_length() <= _BITS)
        if not ok:
            mod = _pykernels
    return mod.poll_scan(*args)


def partition_times(parts, w_num, w_den, devices, n_transfers, cpu_rate, gpu_rate,
                    gpu_overhead_ns, pcie_bw, pcie_latency_ns, *, impl=None):
    args = (parts, w_num, w_den, devices, n_transfers, cpu_rate, gpu_rate,
            gpu_overhead_ns, pcie_bw, pcie_latency_ns)
    mod = impl or (_ckernels if _ckernels is not None else _pykernels)
    if mod is _ckernels:
        biggest = max(parts, default=0)
        wmax = max(w_num, default=1)
        slowest = min(cpu_rate, gpu_rate, pcie_bw)
        worst = (len(w_num) + n_transfers) * (gpu_overhead_ns + pcie_latency_ns
                                              + wmax * biggest * 10**9 // slowest + 1)
        ok = (len(w_num) <= 32
              and _fits(biggest, wmax, max(w_den, default=1), cpu_rate, gpu_rate, pcie_bw)
              and (wmax * biggest * 10**9).bit_length() <= _BITS
              and worst < 2**62)
        if not ok:
            mod = _pykernels
    return mod.partition_times(*args)
