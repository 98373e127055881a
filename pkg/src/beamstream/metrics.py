"""Aggregates over run traces: QoE curves, zero-hits, exit times, overhead,
scheduling intervals and staleness histograms.

All functions are pure functions of the traces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .engine import RunTrace

CENSORED = np.inf


@dataclass
class AggregateSeries:
    x: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    group: str


def _require(traces: Sequence[RunTrace]) -> None:
    if not traces:
        raise ValueError("no traces given")


def staleness_at_slots(scheduled: np.ndarray) -> np.ndarray:
    """Staleness of every user at the start of every slot.

    Rebuilt from the schedule bits alone: zero at slot 1, reset to zero the
    slot after a user is served, otherwise one more than the slot before.
    """
    horizon, n = scheduled.shape
    out = np.zeros((horizon, n), dtype=np.int64)
    cur = np.zeros(n, dtype=np.int64)
    for j in range(horizon):
        out[j] = cur
        cur = np.where(scheduled[j], 0, cur + 1)
    return out


def qoe_curves(traces: Sequence[RunTrace], classes: Optional[Sequence[str]] = None) -> Dict[str, AggregateSeries]:
    """Per-slot mean and std of QoE over all users of each class across seeds."""
    _require(traces)
    known = [c.name for c in traces[0].config.classes]
    wanted = known if classes is None else list(classes)
    for name in wanted:
        if name not in known:
            raise KeyError(f"unknown resolution class {name!r}")
    x = np.arange(1, traces[0].horizon + 1)
    out = {}
    for name in wanted:
        ci = known.index(name)
        cols = [tr.qoe[:, tr.class_index == ci] for tr in traces]
        stacked = np.concatenate(cols, axis=1)
        if stacked.shape[1] == 0:
            mean = std = np.full(len(x), np.nan)
        else:
            mean, std = stacked.mean(axis=1), stacked.std(axis=1)
        out[name] = AggregateSeries(x, mean, std, name)
    return out


def zero_hit_fraction(traces: Sequence[RunTrace]) -> float:
    """Mean over users and seeds of the share of slots spent with an empty buffer."""
    _require(traces)
    return float(np.mean([tr.zero_hit.mean(axis=0).mean() for tr in traces]))


def exit_times(trace: RunTrace, threshold: float) -> np.ndarray:
    """First slot (1-based) at which each user's buffer reaches ``threshold``.

    ``inf`` marks users that never get there.
    """
    hit = trace.buffer >= threshold
    first = np.argmax(hit, axis=0).astype(float) + 1.0
    first[~hit.any(axis=0)] = CENSORED
    return first


def exit_time(traces: Sequence[RunTrace], threshold: float) -> Dict[str, np.ndarray]:
    """Exit slots pooled per class across seeds (``inf`` = censored)."""
    _require(traces)
    names = [c.name for c in traces[0].config.classes]
    out: Dict[str, List[np.ndarray]] = {name: [] for name in names}
    for tr in traces:
        e = exit_times(tr, threshold)
        for ci, name in enumerate(names):
            out[name].append(e[tr.class_index == ci])
    return {k: np.concatenate(v) for k, v in out.items()}


def mean_scheduled_overhead(trace: RunTrace) -> np.ndarray:
    """Per-slot mean overhead over the scheduled users."""
    tau = np.where(trace.scheduled, trace.overhead, 0.0)
    return tau.sum(axis=1) / trace.scheduled.sum(axis=1)


def trailing_mean(x: np.ndarray, window: int) -> np.ndarray:
    if window < 1:
        raise ValueError("window must be >= 1")
    c = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


def overhead_moving_average(traces: Sequence[RunTrace], window: int = 50, group: str = "all") -> AggregateSeries:
    """Trailing moving average of mean scheduled overhead; mean/std across seeds."""
    _require(traces)
    if window == 1:
        rows = np.array([mean_scheduled_overhead(tr) for tr in traces])
    else:
        rows = np.array([trailing_mean(mean_scheduled_overhead(tr), window) for tr in traces])
    return AggregateSeries(np.arange(1, rows.shape[1] + 1), rows.mean(axis=0), rows.std(axis=0), group)


@dataclass
class IntervalStats:
    mean: float
    std: float
    n_gaps: int
    censored_users: int


def schedule_gaps(trace: RunTrace) -> List[np.ndarray]:
    """Gaps in slots between consecutive schedules, one array per user."""
    return [np.diff(np.flatnonzero(trace.scheduled[:, i])) for i in range(trace.n_users)]


def schedule_intervals(traces: Sequence[RunTrace]) -> Dict[str, IntervalStats]:
    """Mean gap between consecutive schedules per class, pooled over users and seeds.

    Users scheduled fewer than twice contribute no gap and are counted as
    censored.
    """
    _require(traces)
    names = [c.name for c in traces[0].config.classes]
    gaps: Dict[str, List[np.ndarray]] = {n: [] for n in names}
    censored = dict.fromkeys(names, 0)
    for tr in traces:
        for i, g in enumerate(schedule_gaps(tr)):
            name = names[tr.class_index[i]]
            if len(g) == 0:
                censored[name] += 1
            else:
                gaps[name].append(g)
    out = {}
    for name in names:
        g = np.concatenate(gaps[name]) if gaps[name] else np.zeros(0)
        mean = float(g.mean()) if len(g) else float("nan")
        std = float(g.std()) if len(g) else float("nan")
        out[name] = IntervalStats(mean, std, int(len(g)), censored[name])
    return out


def staleness_histogram(traces: Sequence[RunTrace]) -> np.ndarray:
    """Counts of staleness values (bin width 1 slot) at the schedule instants."""
    _require(traces)
    values = [staleness_at_slots(tr.scheduled)[tr.scheduled] for tr in traces]
    v = np.concatenate(values)
    return np.bincount(v, minlength=int(v.max()) + 1 if len(v) else 1)


def local_modes(hist: np.ndarray, radius: int = 5) -> List[int]:
    """Bins strictly above every bin within ``radius`` on either side (out of range counts as 0)."""
    h = np.asarray(hist, dtype=float)
    padded = np.concatenate([np.zeros(radius), h, np.zeros(radius)])
    modes = []
    for i in range(len(h)):
        left = padded[i:i + radius]
        right = padded[i + radius + 1:i + 2 * radius + 1]
        if h[i] > left.max() and h[i] > right.max():
            modes.append(i)
    return modes
