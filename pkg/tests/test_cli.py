import json
import subprocess
import sys

import pytest

from mbsched.cli import SUMMARY_KEYS, main
from mbsched.report import BATCH_COLUMNS

GOLDEN_HEADER = ("index,admit_time,num_datasets,batch_bytes,max_buff_s,proc_s,max_lat_s,"
                 "est_max_lat_s,avg_thput_bps,inf_pt_bytes,n_cpu_ops,n_gpu_ops,"
                 "plan_overhead_s,opt_block_s")


def run(tmp_path, name, *extra):
    out = tmp_path / name
    assert main(["run", "--out", str(out), *extra]) == 0
    return out


def test_golden_header(tmp_path):
    out = run(tmp_path, "a", "--workload", "lr1s", "--duration", "30")
    assert ",".join(BATCH_COLUMNS) == GOLDEN_HEADER
    assert (out / "batches.csv").read_text().splitlines()[0] == GOLDEN_HEADER
    assert (out / "latencies.csv").read_text().splitlines()[0] == "dataset_id,ingest_time,latency_s"


def test_baseline_run_has_many_rows(tmp_path):
    out = run(tmp_path, "b", "--workload", "lr1s", "--mode", "baseline", "--trigger", "10",
              "--traffic", "constant", "--duration", "1200")
    assert len((out / "batches.csv").read_text().splitlines()) - 1 >= 100
    doc = json.loads((out / "summary.json").read_text())
    assert tuple(doc) == SUMMARY_KEYS and doc["config"]["trigger_s"] == 10


def test_duration_zero(tmp_path):
    out = run(tmp_path, "z", "--workload", "cm1t", "--duration", "0")
    doc = json.loads((out / "summary.json").read_text())
    assert doc["num_batches"] == 0 and doc["avg_latency_s"] is None
    assert (out / "batches.csv").read_text() == GOLDEN_HEADER + "\n"


@pytest.mark.parametrize("fmt", ["csv", "json"])
@pytest.mark.parametrize("traffic", ["constant", "random", "uniform", "range"])
def test_byte_identical_reruns(tmp_path, fmt, traffic):
    args = ["--workload", "cm2s", "--traffic", traffic, "--duration", "120", "--seed", "4",
            "--format", fmt]
    a, b = run(tmp_path, "x", *args), run(tmp_path, "y", *args)
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_trigger_with_lmstream_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", "--workload", "lr1s", "--trigger", "5", "--out", str(tmp_path / "t")])
    assert e.value.code == 2
    assert "--trigger" in capsys.readouterr().err


@pytest.mark.parametrize("bad", [["--duration", "-1"], ["--rate", "0"], ["--cores", "0"],
                                 ["--workload", "nope"]])
def test_invalid_flags_exit_2(tmp_path, bad):
    args = ["run", "--workload", "lr1s", "--out", str(tmp_path / "q")]
    with pytest.raises(SystemExit) as e:
        main(args + bad)
    assert e.value.code == 2


def test_compare(tmp_path, capsys):
    lm = run(tmp_path, "lm", "--workload", "lr1s", "--duration", "300")
    base = run(tmp_path, "base", "--workload", "lr1s", "--mode", "baseline", "--duration", "300")
    out = tmp_path / "cmp.json"
    assert main(["compare", str(lm), str(lm), "--out", str(out)]) == 0
    same = json.loads(out.read_text())
    assert same["latency_ratio"] == 1.0 and same["throughput_ratio"] == 1.0
    assert same["bounded_fraction_delta"] == 0.0
    assert main(["compare", str(lm), str(base), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["latency_ratio"] < 1.0


def test_compare_errors(tmp_path):
    a = run(tmp_path, "a", "--workload", "lr1s", "--duration", "20")
    c = run(tmp_path, "c", "--workload", "cm1s", "--duration", "20")
    for pair in ([str(a), str(c)], [str(a), str(tmp_path / "missing")]):
        with pytest.raises(SystemExit) as e:
            main(["compare", *pair, "--out", str(tmp_path / "o.json")])
        assert e.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mbsched", "run", "--workload", "lr2s",
                           "--duration", "10", "--out", str(tmp_path / "m")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "m" / "summary.json").exists()
