"""User schedulers: the bandit policy (``b2p``), uniform random, round robin
and a brute-force one-step oracle.

Every scheduler picks exactly ``min(K, N)`` users per slot. The engine hands
ordinary schedulers a :class:`SchedulerContext`, which only carries what the
server can know (estimated buffers and beam staleness). The oracle is the one
exception and receives a :class:`WorldView` with the true buffers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beam import overhead
from .config import BanditParams, BeamModelParams, ExperimentConfig
from .dynamics import step_buffer, transmitted_seconds
from .qoe import qoe_values

ORACLE_MAX_USERS = 20


@dataclass(frozen=True)
class Schedule:
    selected: tuple
    n_users: int

    @property
    def as_onehot(self) -> np.ndarray:
        u = np.zeros(self.n_users, dtype=bool)
        u[list(self.selected)] = True
        return u


@dataclass
class SchedulerContext:
    t: int
    bhat: np.ndarray
    staleness: np.ndarray
    class_index: np.ndarray
    config: ExperimentConfig


@dataclass
class WorldView:
    buffers: np.ndarray
    staleness: np.ndarray
    class_index: np.ndarray
    config: ExperimentConfig


def top_k(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores, ties to the lowest index.

    Equivalent to ``k`` rounds of argmax without replacement.
    """
    return np.argsort(-np.asarray(scores, dtype=float), kind="stable")[:k]


# --------------------------------------------------------------------------
# bandit core
# --------------------------------------------------------------------------
def ucb_bonus(n, t: int, alpha_ucb: float):
    """Exploration bonus ``sqrt(alpha ln t / 2n)``; ``inf`` for arms never pulled."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        bonus = np.sqrt(alpha_ucb * np.log(t) / (2.0 * n))
    bonus = np.where(n > 0, bonus, np.inf)
    return bonus if bonus.ndim else float(bonus)


def trend(bhat, l, beam: BeamModelParams, bandit: BanditParams):
    """Side information added to bandit scores.

    Buffer urgency ``wb / (1 + bhat)`` plus beam freshness
    ``wtau * (1 - tau(l) / tau_max)``.
    """
    bhat = np.asarray(bhat, dtype=float)
    fresh = 1.0 - np.asarray(overhead(beam, l)) / beam.tau_max
    out = bandit.trend_wb / (1.0 + bhat) + bandit.trend_wtau * fresh
    return out if np.ndim(out) else float(out)


def trend_lipschitz(bandit: BanditParams) -> float:
    """Lipschitz constant of :func:`trend` in the estimated buffer."""
    return bandit.trend_wb


@dataclass
class BanditState:
    rhat: np.ndarray
    n: np.ndarray
    lam: float
    mode: str = "decay"  # or "sample-mean"

    @classmethod
    def fresh(cls, n_arms: int, lambda0: float, mode: str = "decay") -> "BanditState":
        if mode not in ("decay", "sample-mean"):
            raise ValueError(f"unknown averaging mode {mode!r}")
        return cls(np.zeros(n_arms), np.zeros(n_arms, dtype=np.int64), lambda0, mode)


def b2p_scores(state: BanditState, t: int, trend_values, alpha_ucb: float) -> np.ndarray:
    return state.rhat + ucb_bonus(state.n, t, alpha_ucb) + trend_values


def b2p_select(state: BanditState, t: int, trend_values, k: int, alpha_ucb: float) -> np.ndarray:
    """Greedy top-``k`` on ``rhat + ucb + trend``."""
    return top_k(b2p_scores(state, t, trend_values, alpha_ucb), k)


def learning_rate(lambda0: float, t: int, horizon: int) -> float:
    return lambda0 * np.exp(-t / horizon)


def b2p_update(state: BanditState, selected, observed, t: int, horizon: int,
               lambda0: float) -> BanditState:
    """Fold slot ``t``'s observed rewards of the pulled arms into the estimates.

    Mutates and returns ``state``; the learning rate moves on to slot ``t + 1``.
    """
    selected = np.asarray(selected, dtype=int)
    observed = np.asarray(observed, dtype=float)
    if observed.shape != selected.shape:
        raise ValueError(f"observed rewards {observed.shape} do not match schedule {selected.shape}")
    state.n[selected] += 1
    if state.mode == "sample-mean":
        step = 1.0 / state.n[selected]
    else:
        step = state.lam
    state.rhat[selected] += step * (observed - state.rhat[selected])
    state.lam = learning_rate(lambda0, t + 1, horizon)
    return state


# --------------------------------------------------------------------------
# schedulers driven by the engine
# --------------------------------------------------------------------------
class Scheduler:
    name = "base"
    needs_world = False

    def reset(self, config: ExperimentConfig, rng: np.random.Generator) -> None:
        self.config = config
        self.k = min(config.k_rf, config.n_users)
        self.rng = rng

    def select(self, ctx) -> np.ndarray:
        raise NotImplementedError

    def update(self, t: int, selected: np.ndarray, observed_qoe: np.ndarray) -> None:
        pass


class B2PScheduler(Scheduler):
    name = "b2p"

    def reset(self, config, rng):
        super().reset(config, rng)
        self.state = BanditState.fresh(config.n_users, config.bandit.lambda0)
        self.state.lam = learning_rate(config.bandit.lambda0, 1, config.horizon)

    def select(self, ctx: SchedulerContext) -> np.ndarray:
        cfg = self.config
        f = trend(ctx.bhat, ctx.staleness, cfg.beam, cfg.bandit)
        return b2p_select(self.state, ctx.t, f, self.k, cfg.bandit.alpha_ucb)

    def update(self, t, selected, observed_qoe):
        b2p_update(self.state, selected, observed_qoe, t, self.config.horizon,
                   self.config.bandit.lambda0)


class UniformScheduler(Scheduler):
    name = "uniform"

    def select(self, ctx) -> np.ndarray:
        return np.sort(self.rng.choice(self.config.n_users, size=self.k, replace=False))


def rr_select(n_users: int, k: int, cursor: int):
    sel = (cursor + np.arange(k)) % n_users
    return sel, (cursor + k) % n_users


class RoundRobinScheduler(Scheduler):
    name = "rr"

    def reset(self, config, rng):
        super().reset(config, rng)
        self.cursor = 0

    def select(self, ctx) -> np.ndarray:
        sel, self.cursor = rr_select(self.config.n_users, self.k, self.cursor)
        return sel


# --------------------------------------------------------------------------
# one-step oracle
# --------------------------------------------------------------------------
def _next_buffers(world: WorldView):
    cfg = world.config
    bitrate = np.array([c.bitrate for c in cfg.classes])[world.class_index]
    tau = overhead(cfg.beam, world.staleness)
    inflow = transmitted_seconds(tau, cfg.link_rate, bitrate) * cfg.channel.mean
    served = step_buffer(world.buffers, 1, inflow, cfg.buffer_cap)
    idle = step_buffer(world.buffers, 0, 0.0, cfg.buffer_cap)
    return np.atleast_1d(served), np.atleast_1d(idle)


def _offsets(world: WorldView) -> np.ndarray:
    return np.array([c.qoe_offset for c in world.config.classes])[world.class_index]


def expected_qoe_gain(world: WorldView) -> np.ndarray:
    """Expected QoE after this slot if served minus if idle, using mean reception."""
    served, idle = _next_buffers(world)
    off = _offsets(world)
    q = world.config.qoe
    return qoe_values(served, off, q) - qoe_values(idle, off, q)


def greedy_select(world: WorldView, k: Optional[int] = None) -> np.ndarray:
    """Top-K users by marginal expected QoE gain."""
    k = min(world.config.k_rf, len(world.buffers)) if k is None else k
    return np.sort(top_k(expected_qoe_gain(world), k))


def oracle_select(world: WorldView, k: Optional[int] = None, atol: float = 1e-12) -> np.ndarray:
    """Brute-force subset maximising the total expected next-slot QoE.

    Enumerates every subset of size ``k``; among optimal subsets (within
    ``atol``) the lexicographically least is returned.
    """
    n = len(world.buffers)
    if n > ORACLE_MAX_USERS:
        raise ValueError(f"oracle enumeration refused for N={n} > {ORACLE_MAX_USERS}")
    k = min(world.config.k_rf, n) if k is None else k
    served, idle = _next_buffers(world)
    off = _offsets(world)
    q = world.config.qoe
    q_served = qoe_values(served, off, q)
    q_idle = qoe_values(idle, off, q)
    best, best_val = None, -np.inf
    for subset in itertools.combinations(range(n), k):
        u = np.zeros(n, dtype=bool)
        u[list(subset)] = True
        total = float(np.where(u, q_served, q_idle).sum())
        if total > best_val + atol:
            best, best_val = subset, total
    return np.array(best, dtype=int)


class OracleScheduler(Scheduler):
    name = "oracle"
    needs_world = True

    def reset(self, config, rng):
        if config.n_users > ORACLE_MAX_USERS:
            raise ValueError(f"oracle scheduler refused for N={config.n_users} > {ORACLE_MAX_USERS}")
        super().reset(config, rng)

    def select(self, world: WorldView) -> np.ndarray:
        return oracle_select(world, self.k)


SCHEDULERS = {
    "b2p": B2PScheduler,
    "uniform": UniformScheduler,
    "rr": RoundRobinScheduler,
    "oracle": OracleScheduler,
}


def make_scheduler(name: str) -> Scheduler:
    try:
        return SCHEDULERS[name]()
    except KeyError:
        raise ValueError(f"unknown scheduler {name!r}; choose from {sorted(SCHEDULERS)}") from None
