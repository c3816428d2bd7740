"""Command-line entry point: ``mbsched run`` and ``mbsched compare``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import traffic as tr
from .domain import InvalidArgument
from .engine import Mode, SimConfig, run_simulation
from .metrics import summarize
from .report import write_tables
from .workloads import ALL_WORKLOADS, build_workload

DEFAULT_TRIGGER_S = 10

# closed key set of summary.json
SUMMARY_KEYS = ("workload", "mode", "config", "num_batches", "num_datasets", "total_bytes",
                "span_s", "avg_latency_s", "final_avg_thput_bps", "p99_max_lat_s",
                "mean_proc_s", "bounded_fraction", "cap_breaches", "polls", "phase_pct")


def _traffic(args, row_bytes) -> tr.TrafficSpec:
    kind = args.traffic
    if kind == "constant":
        return tr.constant(args.rate, row_bytes, args.seed)
    if kind == "random":
        return tr.random_normal(args.rate, row_bytes, args.seed, args.sigma)
    if kind == "uniform":
        return tr.uniform(args.rate, row_bytes, args.seed)
    lo = args.range_lo if args.range_lo is not None else max(1, int(args.rate * 0.1))
    hi = args.range_hi if args.range_hi is not None else max(lo, int(args.rate * 5))
    return tr.random_range(lo, hi, row_bytes, args.seed)


def build_config(args) -> SimConfig:
    workload = build_workload(args.workload)
    return SimConfig(
        workload=workload,
        traffic=_traffic(args, workload.row_bytes),
        mode=Mode(args.mode),
        duration_s=args.duration,
        num_cores=args.cores,
        trigger_s=args.trigger if args.trigger is not None else DEFAULT_TRIGGER_S,
    )


def _config_json(args, cfg: SimConfig) -> dict:
    return {
        "traffic": args.traffic,
        "rate": args.rate,
        "sigma": cfg.traffic.sigma if args.traffic == "random" else None,
        "range_lo": cfg.traffic.lo_rows,
        "range_hi": cfg.traffic.hi_rows,
        "seed": args.seed,
        "duration_s": args.duration,
        "cores": args.cores,
        "trigger_s": cfg.trigger_s if cfg.mode is Mode.BASELINE else None,
        "slide_s": cfg.workload.window.slide_s,
        "range_s": cfg.workload.window.range_s,
        "admission_cost_ns": cfg.admission_cost_ns if cfg.polls else 0,
        "format": args.format,
    }


def summary_document(args, cfg: SimConfig, result) -> dict:
    doc = dict.fromkeys(SUMMARY_KEYS)
    doc.update(workload=cfg.workload.name.value, mode=cfg.mode.value,
               config=_config_json(args, cfg), num_batches=0, num_datasets=0, total_bytes=0,
               cap_breaches=0, polls=result.polls)
    if result.records:
        s = summarize(result.records, result.latencies, slide_s=cfg.workload.window.slide_s,
                      polling=cfg.polls, admission_cost_ns=cfg.admission_cost_ns,
                      max_datasets=cfg.max_datasets)
        doc.update(s.to_json())
    return doc


def cmd_run(args, parser) -> int:
    if args.trigger is not None and args.mode != Mode.BASELINE.value:
        parser.error("--trigger only applies to --mode baseline")
    if args.duration < 0:
        parser.error("--duration must be >= 0")
    if args.rate <= 0:
        parser.error("--rate must be > 0")
    if args.cores < 1:
        parser.error("--cores must be >= 1")
    try:
        cfg = build_config(args)
    except InvalidArgument as exc:
        parser.error(str(exc))
    result = run_simulation(cfg)
    out = Path(args.out)
    write_tables(out, result.records, result.latencies, args.format)
    doc = summary_document(args, cfg, result)
    (out / "summary.json").write_text(json.dumps(doc, indent=2) + "\n")
    return 0


def _ratio(a, b):
    if a is None or b is None or b == 0:
        return None
    return a / b


def cmd_compare(args, parser) -> int:
    docs = []
    for d in (args.a, args.b):
        path = Path(d) / "summary.json"
        if not path.is_file():
            parser.error(f"no summary.json in {d}")
        docs.append(json.loads(path.read_text()))
    a, b = docs
    if a["workload"] != b["workload"]:
        parser.error(f"workload mismatch: {a['workload']} vs {b['workload']}")
    bf = None
    if a.get("bounded_fraction") is not None and b.get("bounded_fraction") is not None:
        bf = a["bounded_fraction"] - b["bounded_fraction"]
    report = {
        "workload": a["workload"],
        "a": {"dir": str(args.a), "mode": a["mode"]},
        "b": {"dir": str(args.b), "mode": b["mode"]},
        "latency_ratio": _ratio(a.get("avg_latency_s"), b.get("avg_latency_s")),
        "throughput_ratio": _ratio(a.get("final_avg_thput_bps"), b.get("final_avg_thput_bps")),
        "bounded_fraction_delta": bf,
    }
    text = json.dumps(report, indent=2) + "\n"
    Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mbsched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one configuration and write its artifacts")
    run.add_argument("--workload", required=True, type=str.lower,
                     choices=[w.value.lower() for w in ALL_WORKLOADS])
    run.add_argument("--traffic", default="random",
                     choices=[k.value for k in tr.TrafficKind])
    run.add_argument("--rate", type=float, default=1000.0, help="rows per second")
    run.add_argument("--sigma", type=float, default=None,
                     help="stddev in rows for random traffic (default 0.25 x rate)")
    run.add_argument("--range-lo", type=int, default=None, help="range traffic lower bound")
    run.add_argument("--range-hi", type=int, default=None, help="range traffic upper bound")
    run.add_argument("--mode", default=Mode.LMSTREAM.value, choices=[m.value for m in Mode])
    run.add_argument("--trigger", type=int, default=None,
                     help=f"trigger interval in s, baseline only (default {DEFAULT_TRIGGER_S})")
    run.add_argument("--duration", type=int, default=1200, help="simulated seconds")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--cores", type=int, default=12)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--format", default="csv", choices=["csv", "json"])

    cmp_ = sub.add_parser("compare", help="ratios between two run directories (a over b)")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--out", default="compare.json")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args, parser)
    return cmd_compare(args, parser)


if __name__ == "__main__":
    sys.exit(main())
