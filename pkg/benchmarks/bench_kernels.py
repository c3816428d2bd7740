"""Compiled vs pure-Python kernels, plus a full simulation on each backend.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import timeit

from mbsched import _pykernels, kernels
from mbsched.engine import SimConfig, run_simulation
from mbsched.traffic import random_normal
from mbsched.workloads import build_workload

# a 5 s slide scanned in 10 ms steps: ~500 polls, admits near the end
SCAN = (0, 6_000_000_000, 10_000_000, 0, 300_000, 10**9, 4_000_000, 5_000_000_000, 1, 10_000_000)
PARTS = ([25_000] * 12, [4, 9, 9, 9, 9], [5, 10, 10, 10, 10], [1, 0, 1, 0, 1], 4,
         100_000_000, 2_000_000_000, 1_400_000, 10_000_000_000, 10_000)


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"{label:<34s} {best * 1e6:12.1f} us")
    return best


def simulate():
    w = build_workload("LR1S")
    run_simulation(SimConfig(w, random_normal(1000, w.row_bytes, seed=0), duration_s=1200))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    n = ap.parse_args().repeat
    print(f"active backend: {kernels.BACKEND}")
    if kernels._ckernels is None:
        print("compiled kernels unavailable; only the Python timings are shown")
    rows = []
    for name, args in (("poll_scan", SCAN), ("partition_times", PARTS)):
        py = bench(f"{name} [python]", lambda: getattr(_pykernels, name)(*args), n)
        if kernels._ckernels is not None:
            cy = bench(f"{name} [cython]", lambda: getattr(kernels._ckernels, name)(*args), n)
            rows.append((name, py / cy))
    saved = kernels._ckernels
    py = bench("simulation LR1S 1200 s [python]", lambda: (setattr(kernels, "_ckernels", None), simulate()), 3)
    kernels._ckernels = saved
    if saved is not None:
        cy = bench("simulation LR1S 1200 s [cython]", simulate, 3)
        rows.append(("simulation", py / cy))
    for name, ratio in rows:
        print(f"speedup {name}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
