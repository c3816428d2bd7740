"""Serialization of run artifacts and the matching readers.

Times are written as exact nine-digit decimals, so integer nanoseconds
round-trip without loss.
"""
from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .domain import BatchRecord, ns_to_str, str_to_ns
from .engine import DatasetLatency

BATCH_COLUMNS = ("index", "admit_time", "num_datasets", "batch_bytes", "max_buff_s", "proc_s",
                 "max_lat_s", "est_max_lat_s", "avg_thput_bps", "inf_pt_bytes", "n_cpu_ops",
                 "n_gpu_ops", "plan_overhead_s", "opt_block_s")
LATENCY_COLUMNS = ("dataset_id", "ingest_time", "latency_s")


def decimal_str(value: Fraction, places: int) -> str:
    """Exact decimal rendering of ``value`` rounded half-even to ``places``."""
    scaled = round(Fraction(value) * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def batch_row(r: BatchRecord) -> dict:
    return {
        "index": r.index,
        "admit_time": ns_to_str(r.admit_ns),
        "num_datasets": r.num_datasets,
        "batch_bytes": r.batch_bytes,
        "max_buff_s": ns_to_str(r.max_buff_ns),
        "proc_s": ns_to_str(r.proc_ns),
        "max_lat_s": ns_to_str(r.max_lat_ns),
        "est_max_lat_s": "" if r.est_max_lat is None else decimal_str(r.est_max_lat, 9),
        "avg_thput_bps": decimal_str(r.avg_thput, 6),
        "inf_pt_bytes": r.inf_pt_bytes,
        "n_cpu_ops": r.n_cpu_ops,
        "n_gpu_ops": r.n_gpu_ops,
        "plan_overhead_s": ns_to_str(r.plan_overhead_ns),
        "opt_block_s": ns_to_str(r.opt_block_ns),
    }


def record_from_row(row: dict) -> BatchRecord:
    est = row["est_max_lat_s"]
    return BatchRecord(
        index=int(row["index"]),
        admit_ns=str_to_ns(row["admit_time"]),
        num_datasets=int(row["num_datasets"]),
        batch_bytes=int(row["batch_bytes"]),
        max_buff_ns=str_to_ns(row["max_buff_s"]),
        proc_ns=str_to_ns(row["proc_s"]),
        max_lat_ns=str_to_ns(row["max_lat_s"]),
        est_max_lat=Fraction(est) if est not in ("", None) else None,
        avg_thput=Fraction(row["avg_thput_bps"]),
        inf_pt_bytes=int(row["inf_pt_bytes"]),
        n_cpu_ops=int(row["n_cpu_ops"]),
        n_gpu_ops=int(row["n_gpu_ops"]),
        plan_overhead_ns=str_to_ns(row["plan_overhead_s"]),
        opt_block_ns=str_to_ns(row["opt_block_s"]),
    )


def latency_row(lat: DatasetLatency) -> dict:
    return {"dataset_id": lat.dataset_id, "ingest_time": ns_to_str(lat.ingest_ns),
            "latency_s": ns_to_str(lat.latency_ns)}


def latency_from_row(row: dict) -> DatasetLatency:
    return DatasetLatency(int(row["dataset_id"]), str_to_ns(row["ingest_time"]),
                          str_to_ns(row["latency_s"]))


def _write_csv(path: Path, columns, rows: Iterable[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _write_json(path: Path, rows: Iterable[dict]) -> None:
    path.write_text(json.dumps(list(rows), indent=1) + "\n")


def write_tables(out: Path, records, latencies, fmt: str = "csv") -> None:
    out.mkdir(parents=True, exist_ok=True)
    batches = (batch_row(r) for r in records)
    lats = (latency_row(l) for l in latencies)
    if fmt == "csv":
        _write_csv(out / "batches.csv", BATCH_COLUMNS, batches)
        _write_csv(out / "latencies.csv", LATENCY_COLUMNS, lats)
    elif fmt == "json":
        _write_json(out / "batches.json", batches)
        _write_json(out / "latencies.json", lats)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _rows(path: Path) -> list[dict]:
    if path.suffix == ".json":
        return [{k: ("" if v is None else str(v)) for k, v in row.items()}
                for row in json.loads(path.read_text())]
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def read_tables(out: Path) -> tuple[list[BatchRecord], list[DatasetLatency]]:
    """Load records and latencies from a run directory in either format."""
    out = Path(out)
    ext = ".csv" if (out / "batches.csv").exists() else ".json"
    records = [record_from_row(r) for r in _rows(out / f"batches{ext}")]
    lats = [latency_from_row(r) for r in _rows(out / f"latencies{ext}")]
    return records, lats
