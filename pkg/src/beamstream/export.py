"""Trace and aggregate file formats.

Trace CSV (one file per run)::

    # config_digest=<hex> scheduler=<name> seed=<int> rng=<generator>
    t,user,scheduled,overhead,transmitted_s,received_s,buffer_s,buffer_est_s,qoe,zero_hit,region

``t`` is 1-based, floats carry 6 significant digits and ``overhead`` is empty
for users not scheduled in that slot. The JSON variant stores the same
columns at full precision.

Aggregate CSVs share the leading key columns ``scheduler,n_users,k_rf``:

=====================  =====================================================
file                   remaining columns
=====================  =====================================================
qoe_by_class.csv       class,t,mean,std
zero_hits.csv          zero_hit_fraction,zero_hit_fraction_per_user
exit_times.csv         seed,user,class,threshold,exit_slot,censored
overhead_ma.csv        window,t,mean,std
intervals.csv          class,mean_interval,std,n_gaps,censored_users
staleness_hist.csv     staleness,count
=====================  =====================================================

``zero_hit_fraction_per_user`` is the fraction divided by ``n_users``.
``exit_slot`` is empty when ``censored`` is 1.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np

from . import metrics
from .config import ExperimentConfig, build_population
from .engine import RunTrace
from .qoe import REGION_NAMES

TRACE_COLUMNS = ["t", "user", "scheduled", "overhead", "transmitted_s", "received_s",
                 "buffer_s", "buffer_est_s", "qoe", "zero_hit", "region"]
AGGREGATE_FILES = ("qoe_by_class.csv", "zero_hits.csv", "exit_times.csv",
                   "overhead_ma.csv", "intervals.csv", "staleness_hist.csv")
KEY = ["scheduler", "n_users", "k_rf"]


def _g6(x: float) -> str:
    return format(float(x), ".6g")


def _g(x: float) -> str:
    return repr(float(x))


def trace_filename(trace: RunTrace, fmt: str = "csv") -> str:
    c = trace.config
    return f"trace_{trace.scheduler}_N{c.n_users}_K{c.k_rf}_seed{trace.seed}.{fmt}"


def _header(trace: RunTrace) -> str:
    return f"config_digest={trace.digest} scheduler={trace.scheduler} seed={trace.seed} rng={trace.rng}"


def trace_to_csv(trace: RunTrace) -> str:
    buf = io.StringIO()
    buf.write("# " + _header(trace) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for j in range(trace.horizon):
        t = j + 1
        for i in range(trace.n_users):
            s = bool(trace.scheduled[j, i])
            w.writerow([t, i, int(s), _g6(trace.overhead[j, i]) if s else "",
                        _g6(trace.transmitted[j, i]), _g6(trace.received[j, i]),
                        _g6(trace.buffer[j, i]), _g6(trace.buffer_est[j, i]),
                        _g6(trace.qoe[j, i]), int(trace.zero_hit[j, i]),
                        REGION_NAMES[trace.region[j, i]]])
    return buf.getvalue()


def trace_to_json(trace: RunTrace) -> str:
    tau = trace.overhead
    doc = {
        "config_digest": trace.digest, "scheduler": trace.scheduler, "seed": trace.seed,
        "rng": trace.rng, "columns": TRACE_COLUMNS,
        "scheduled": trace.scheduled.astype(int).tolist(),
        "overhead": [[None if np.isnan(v) else float(v) for v in row] for row in tau],
        "transmitted_s": trace.transmitted.tolist(), "received_s": trace.received.tolist(),
        "buffer_s": trace.buffer.tolist(), "buffer_est_s": trace.buffer_est.tolist(),
        "qoe": trace.qoe.tolist(), "zero_hit": trace.zero_hit.astype(int).tolist(),
        "region": trace.region.astype(int).tolist(),
    }
    return json.dumps(doc, separators=(",", ":"))


def write_trace(trace: RunTrace, directory, fmt: str = "csv") -> Path:
    path = Path(directory) / trace_filename(trace, fmt)
    text = trace_to_csv(trace) if fmt == "csv" else trace_to_json(trace)
    path.write_text(text)
    return path


def _parse_header(line: str) -> Dict[str, str]:
    return dict(kv.split("=", 1) for kv in line.lstrip("#").split())


def read_trace(path, config: ExperimentConfig) -> RunTrace:
    """Rebuild a :class:`RunTrace` from a CSV or JSON trace file."""
    path = Path(path)
    n, horizon = config.n_users, config.horizon
    cls = build_population(config)
    if path.suffix == ".json":
        d = json.loads(path.read_text())
        tau = np.array([[np.nan if v is None else v for v in row] for row in d["overhead"]], dtype=float)
        return RunTrace(config, d["scheduler"], int(d["seed"]), cls,
                        np.array(d["scheduled"], dtype=bool), tau,
                        np.array(d["transmitted_s"]), np.array(d["received_s"]),
                        np.array(d["buffer_s"]), np.array(d["buffer_est_s"]), np.array(d["qoe"]),
                        np.array(d["zero_hit"], dtype=bool), np.array(d["region"], dtype=np.int8),
                        d["rng"])
    with path.open() as f:
        head = _parse_header(f.readline())
        reader = csv.DictReader(f)
        shape = (horizon, n)
        cols = {k: np.zeros(shape) for k in ("transmitted_s", "received_s", "buffer_s", "buffer_est_s", "qoe")}
        sched = np.zeros(shape, dtype=bool)
        zero = np.zeros(shape, dtype=bool)
        region = np.zeros(shape, dtype=np.int8)
        tau = np.full(shape, np.nan)
        for row in reader:
            j, i = int(row["t"]) - 1, int(row["user"])
            sched[j, i] = row["scheduled"] == "1"
            if row["overhead"]:
                tau[j, i] = float(row["overhead"])
            for k in cols:
                cols[k][j, i] = float(row[k])
            zero[j, i] = row["zero_hit"] == "1"
            region[j, i] = REGION_NAMES.index(row["region"])
    return RunTrace(config, head["scheduler"], int(head["seed"]), cls, sched, tau,
                    cols["transmitted_s"], cols["received_s"], cols["buffer_s"],
                    cols["buffer_est_s"], cols["qoe"], zero, region, head["rng"])


# --------------------------------------------------------------------------
# aggregates
# --------------------------------------------------------------------------
def aggregate_rows(traces: Sequence[RunTrace], window: int = 50) -> Dict[str, List[list]]:
    """Rows (without header) for every aggregate file, for one scheduler and config."""
    cfg = traces[0].config
    key = [traces[0].scheduler, cfg.n_users, cfg.k_rf]
    rows: Dict[str, List[list]] = {name: [] for name in AGGREGATE_FILES}

    for name, series in metrics.qoe_curves(traces).items():
        for x, m, s in zip(series.x, series.mean, series.std):
            rows["qoe_by_class.csv"].append(key + [name, int(x), _g(m), _g(s)])

    zh = metrics.zero_hit_fraction(traces)
    rows["zero_hits.csv"].append(key + [_g(zh), _g(zh / cfg.n_users)])

    for threshold in (cfg.critical_s, cfg.highly_critical_s):
        for tr in traces:
            names = tr.class_names()
            for i, e in enumerate(metrics.exit_times(tr, threshold)):
                censored = not np.isfinite(e)
                rows["exit_times.csv"].append(key + [tr.seed, i, names[i], _g(threshold),
                                                     "" if censored else int(e), int(censored)])

    ma = metrics.overhead_moving_average(traces, window)
    for x, m, s in zip(ma.x, ma.mean, ma.std):
        rows["overhead_ma.csv"].append(key + [window, int(x), _g(m), _g(s)])

    for name, st in metrics.schedule_intervals(traces).items():
        rows["intervals.csv"].append(key + [name, _g(st.mean), _g(st.std), st.n_gaps, st.censored_users])

    hist = metrics.staleness_histogram(traces)
    for l, c in enumerate(hist):
        rows["staleness_hist.csv"].append(key + [l, int(c)])
    return rows


AGGREGATE_HEADERS = {
    "qoe_by_class.csv": KEY + ["class", "t", "mean", "std"],
    "zero_hits.csv": KEY + ["zero_hit_fraction", "zero_hit_fraction_per_user"],
    "exit_times.csv": KEY + ["seed", "user", "class", "threshold", "exit_slot", "censored"],
    "overhead_ma.csv": KEY + ["window", "t", "mean", "std"],
    "intervals.csv": KEY + ["class", "mean_interval", "std", "n_gaps", "censored_users"],
    "staleness_hist.csv": KEY + ["staleness", "count"],
}


def write_aggregates(groups: Iterable[Sequence[RunTrace]], directory, window: int = 50) -> List[Path]:
    """Write the six aggregate files, one block of rows per trace group."""
    merged: Dict[str, List[list]] = {name: [] for name in AGGREGATE_FILES}
    for traces in groups:
        for name, rows in aggregate_rows(traces, window).items():
            merged[name].extend(rows)
    paths = []
    for name in AGGREGATE_FILES:
        path = Path(directory) / name
        with path.open("w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(AGGREGATE_HEADERS[name])
            w.writerows(merged[name])
        paths.append(path)
    return paths


REGRET_COLUMNS = ["T", "mode", "seed", "regret", "bound", "instance"]


def write_regret_report(report, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(REGRET_COLUMNS)
        for r in report.rows:
            w.writerow([r.T, r.mode, r.seed, _g(r.regret), "" if r.bound is None else _g(r.bound), r.instance])
    return path
