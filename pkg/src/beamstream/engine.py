"""Slot-by-slot simulation of the streaming cell."""
from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .beam import overhead
from .config import ExperimentConfig, build_population, ensure_valid
from .dynamics import draw_success, step_buffer, step_estimate, transmitted_seconds
from .qoe import classify_region, qoe_values
from .schedulers import SchedulerContext, WorldView, make_scheduler

RNG_NAME = "numpy.random.PCG64+SeedSequence"

# spawn-key tags for the per-seed substreams
_CHANNEL_STREAM = 0
_SCHEDULER_STREAM = 1


def user_stream(seed: int, user: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_CHANNEL_STREAM, user))))


def scheduler_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_SCHEDULER_STREAM,))))


@dataclass
class RunTrace:
    """Per-slot, per-user record of one episode.

    Every array is ``(horizon, n_users)`` and row ``j`` holds slot ``t = j + 1``.
    ``overhead`` is NaN where the user was not scheduled.
    """

    config: ExperimentConfig
    scheduler: str
    seed: int
    class_index: np.ndarray
    scheduled: np.ndarray
    overhead: np.ndarray
    transmitted: np.ndarray
    received: np.ndarray
    buffer: np.ndarray
    buffer_est: np.ndarray
    qoe: np.ndarray
    zero_hit: np.ndarray
    region: np.ndarray
    rng: str = RNG_NAME

    @property
    def digest(self) -> str:
        return self.config.digest()

    @property
    def horizon(self) -> int:
        return self.scheduled.shape[0]

    @property
    def n_users(self) -> int:
        return self.scheduled.shape[1]

    def class_names(self) -> List[str]:
        return [self.config.classes[i].name for i in self.class_index]


def draw_channel(config: ExperimentConfig, seed: int) -> np.ndarray:
    """Reception probabilities for every (slot, user), one substream per user."""
    cols = [draw_success(config.channel, user_stream(seed, i), size=config.horizon)
            for i in range(config.n_users)]
    return np.column_stack(cols) if cols else np.zeros((config.horizon, 0))


def run_episode(config: ExperimentConfig, scheduler: str, seed: int, probe=None) -> RunTrace:
    """Simulate ``config.horizon`` slots under the named scheduler.

    ``probe``, when given, is called with a private copy of every context
    handed to the scheduler.
    """
    ensure_valid(config)
    cfg = config
    n, horizon, cap = cfg.n_users, cfg.horizon, cfg.buffer_cap
    cls = build_population(cfg)
    bitrate = np.array([c.bitrate for c in cfg.classes])[cls]
    offsets = np.array([c.qoe_offset for c in cfg.classes])[cls]
    p = draw_channel(cfg, seed)

    sched = make_scheduler(scheduler) if isinstance(scheduler, str) else scheduler
    sched.reset(cfg, scheduler_stream(seed))

    b = np.zeros(n)
    bhat = np.zeros(n)
    stale = np.zeros(n, dtype=np.int64)

    shape = (horizon, n)
    rec = {k: np.zeros(shape) for k in ("transmitted", "received", "buffer", "buffer_est", "qoe")}
    rec_sched = np.zeros(shape, dtype=bool)
    rec_tau = np.full(shape, np.nan)
    rec_zero = np.zeros(shape, dtype=bool)
    rec_region = np.zeros(shape, dtype=np.int8)

    for j in range(horizon):
        t = j + 1
        if sched.needs_world:
            view = WorldView(b.copy(), stale.copy(), cls, cfg)
        else:
            view = SchedulerContext(t, bhat.copy(), stale.copy(), cls, cfg)
        if probe is not None:
            probe(dataclasses.replace(view, **{k: v.copy() for k, v in vars(view).items()
                                               if isinstance(v, np.ndarray)}))
        selected = np.asarray(sched.select(view), dtype=int)
        u = np.zeros(n, dtype=bool)
        u[selected] = True
        if u.sum() != min(cfg.k_rf, n):
            raise RuntimeError(f"scheduler {sched.name} picked {u.sum()} users at slot {t}")

        tau = overhead(cfg.beam, stale)
        sent = np.where(u, transmitted_seconds(tau, cfg.link_rate, bitrate), 0.0)
        got = sent * p[j]
        b = step_buffer(b, u, got, cap)
        bhat = step_estimate(bhat, u, sent, cap)
        q = qoe_values(b, offsets, cfg.qoe)

        rec_sched[j] = u
        rec_tau[j, u] = tau[u]
        rec["transmitted"][j] = sent
        rec["received"][j] = got
        rec["buffer"][j] = b
        rec["buffer_est"][j] = bhat
        rec["qoe"][j] = q
        rec_zero[j] = b == 0.0
        rec_region[j] = classify_region(b, cfg.critical_s, cfg.highly_critical_s)

        sched.update(t, selected, q[selected])
        stale = np.where(u, 0, stale + 1)

    return RunTrace(cfg, sched.name, int(seed), cls, rec_sched, rec_tau,
                    rec["transmitted"], rec["received"], rec["buffer"], rec["buffer_est"],
                    rec["qoe"], rec_zero, rec_region)


def _episode_job(args):
    return run_episode(*args)


def run_experiment(config: ExperimentConfig, scheduler: str,
                   seeds: Optional[List[int]] = None, parallel: int = 1) -> List[RunTrace]:
    """One episode per seed, returned in seed order.

    ``parallel`` caps the number of episodes running at once in worker
    processes.
    """
    ensure_valid(config)
    seeds = list(config.seeds if seeds is None else seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    jobs = [(config, scheduler, s) for s in seeds]
    if parallel <= 1 or len(jobs) == 1:
        return [_episode_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(_episode_job, jobs))
