"""Pure-Python kernels. Reference semantics for the compiled twin in
``_ckernels.pyx``; both must return identical results for identical input."""
from __future__ import annotations

NS = 1_000_000_000


def poll_scan(t0, t_end, step, oldest_ns, total_bytes, cum_bytes, cum_proc_ns,
              thr_num, thr_den, horizon_ns):
    """Walk polls t0, t0+step, ... up to t_end inclusive (t_end < 0: no bound).

    Returns ``(admit_time, polls)`` where ``admit_time`` is the first poll with
    ``buff + horizon + total*cum_proc/cum_bytes >= thr_num/thr_den`` (all in ns),
    or -1 when no poll in range admits.
    """
    rhs = thr_num * cum_bytes
    fixed = total_bytes * cum_proc_ns
    polls = 0
    t = t0
    while t_end < 0 or t <= t_end:
        polls += 1
        if ((t + horizon_ns - oldest_ns) * cum_bytes + fixed) * thr_den >= rhs:
            return t, polls
        t += step
    return -1, polls


def _ceil_div(a, b):
    return -(-a // b)


def partition_times(parts, w_num, w_den, devices, n_transfers, cpu_rate, gpu_rate,
                    gpu_overhead_ns, pcie_bw, pcie_latency_ns):
    """Latent execution time (ns) of one partition per entry of ``parts``.

    ``devices[k]`` is 0 for CPU, 1 for GPU. Each op and each transfer is
    rounded up to a whole nanosecond on its own. Empty partitions take 0.
    """
    out = []
    n_ops = len(w_num)
    for b in parts:
        if b <= 0:
            out.append(0)
            continue
        total = 0
        for k in range(n_ops):
            if devices[k]:
                total += gpu_overhead_ns + _ceil_div(w_num[k] * b * NS, w_den[k] * gpu_rate)
            else:
                total += _ceil_div(w_num[k] * b * NS, w_den[k] * cpu_rate)
        if n_transfers:
            total += n_transfers * (pcie_latency_ns + _ceil_div(b * NS, pcie_bw))
        out.append(total)
    return out
