# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_pykernels``. Integer math runs in 128 bits; the Python
wrapper in ``kernels`` only routes here when operands are known to fit."""

cdef extern from *:
    ctypedef long long i128 "__int128"

cdef i128 NS = 1000000000


cdef inline i128 ceil_div(i128 a, i128 b):
    return (a + b - 1) // b


def poll_scan(long long t0, long long t_end, long long step, long long oldest_ns,
              long long total_bytes, long long cum_bytes, long long cum_proc_ns,
              long long thr_num, long long thr_den, long long horizon_ns):
    cdef i128 rhs = <i128>thr_num * cum_bytes
    cdef i128 fixed = <i128>total_bytes * cum_proc_ns
    cdef i128 lhs
    cdef long long polls = 0
    cdef long long t = t0
    while t_end < 0 or t <= t_end:
        polls += 1
        lhs = (<i128>(t + horizon_ns - oldest_ns) * cum_bytes + fixed) * thr_den
        if lhs >= rhs:
            return t, polls
        t += step
    return -1, polls


def partition_times(parts, w_num, w_den, devices, long long n_transfers,
                    long long cpu_rate, long long gpu_rate, long long gpu_overhead_ns,
                    long long pcie_bw, long long pcie_latency_ns):
    cdef Py_ssize_t n_ops = len(w_num)
    cdef Py_ssize_t k
    cdef long long b
    cdef i128 total
    cdef long long[32] wn, wd
    cdef char[32] dev
    if n_ops > 32:
        raise ValueError("plan too large for compiled kernel")
    for k in range(n_ops):
        wn[k] = w_num[k]
        wd[k] = w_den[k]
        dev[k] = 1 if devices[k] else 0
    out = []
    for pb in parts:
        b = pb
        if b <= 0:
            out.append(0)
            continue
        total = 0
        for k in range(n_ops):
            if dev[k]:
                total += gpu_overhead_ns + ceil_div(<i128>wn[k] * b * NS, <i128>wd[k] * gpu_rate)
            else:
                total += ceil_div(<i128>wn[k] * b * NS, <i128>wd[k] * cpu_rate)
        if n_transfers:
            total += <i128>n_transfers * (pcie_latency_ns + ceil_div(<i128>b * NS, <i128>pcie_bw))
        out.append(<long long>total)
    return out
