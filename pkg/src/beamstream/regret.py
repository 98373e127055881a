"""Stationary-bandit harness for the scheduler's bandit core.

Runs the same selection and update code as the streaming scheduler against
arms with fixed reward means and fixed trend values, measures pseudo-regret
and compares it with the closed-form regret bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .config import BanditParams
from .schedulers import BanditState, b2p_select, b2p_update


class VacuousBoundError(ValueError):
    """Raised when some gap does not exceed ``L_F * b_max``."""


@dataclass(frozen=True)
class StationaryArmSet:
    means: tuple
    trend: Optional[tuple] = None
    noise: str = "bernoulli"  # "bernoulli" or "none"
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.means, dtype=float)
        if np.any((m < 0) | (m > 1)):
            raise ValueError("arm means must lie in [0, 1]")
        if self.noise not in ("bernoulli", "none"):
            raise ValueError(f"unknown noise law {self.noise!r}")
        if self.trend is not None and len(self.trend) != len(self.means):
            raise ValueError("one trend value per arm required")

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @property
    def gaps(self) -> np.ndarray:
        m = np.asarray(self.means, dtype=float)
        return m.max() - m

    @property
    def trend_values(self) -> np.ndarray:
        return np.zeros(self.n_arms) if self.trend is None else np.asarray(self.trend, dtype=float)


@dataclass
class StationaryRun:
    pulls: np.ndarray    # (T, K) arm ids
    rewards: np.ndarray  # (T, K)
    counts: np.ndarray   # n_i(T)


def run_stationary(arms: StationaryArmSet, k: int, horizon: int, params: BanditParams,
                   seed: int, mode: str = "decay") -> StationaryRun:
    if k > arms.n_arms:
        raise ValueError("K exceeds the number of arms")
    rng = np.random.default_rng(seed)
    means = np.asarray(arms.means, dtype=float)
    if arms.noise == "bernoulli":
        table = (rng.random((horizon, arms.n_arms)) < means).astype(float)
    else:
        table = np.broadcast_to(means, (horizon, arms.n_arms))
    state = BanditState.fresh(arms.n_arms, params.lambda0, mode)
    state.lam = params.lambda0 * math.exp(-1.0 / horizon)
    f = arms.trend_values
    pulls = np.empty((horizon, k), dtype=np.int64)
    rewards = np.empty((horizon, k))
    for j in range(horizon):
        t = j + 1
        sel = b2p_select(state, t, f, k, params.alpha_ucb)
        r = table[j, sel]
        b2p_update(state, sel, r, t, horizon, params.lambda0)
        pulls[j] = sel
        rewards[j] = r
    return StationaryRun(pulls, rewards, state.n.copy())


def empirical_regret(run: StationaryRun, arms: StationaryArmSet) -> np.ndarray:
    """Cumulative pseudo-regret ``R(t) = sum_i gap_i * n_i(t)`` for every t."""
    per_slot = arms.gaps[run.pulls].sum(axis=1)
    return np.cumsum(per_slot)


def theorem1_bound(arms: StationaryArmSet, horizon: int, alpha_ucb: float,
                   lipschitz: float, b_max: float) -> float:
    if alpha_ucb <= 1:
        raise ValueError("alpha_ucb must exceed 1")
    gaps = arms.gaps
    best = int(np.argmax(arms.means))
    slack = lipschitz * b_max
    total = 0.0
    for i, d in enumerate(gaps):
        if i == best:
            continue
        if d <= slack:
            raise VacuousBoundError(f"arm {i}: gap {d:g} <= L_F*b_max = {slack:g}; bound vacuous")
        total += 2 * alpha_ucb * math.log(horizon) / (d - slack) + 2 * alpha_ucb / (alpha_ucb - 1) * (d + slack)
    return total


@dataclass(frozen=True)
class HarnessInstance:
    arms: StationaryArmSet
    lipschitz: float = 0.0
    b_max: float = 60.0
    k: int = 1


def default_instances(b_max: float = 60.0) -> List[HarnessInstance]:
    """Two- and five-arm instances, each with and without an adversarial trend.

    The adversarial trend lifts every suboptimal arm by ``L_F * b_max`` equal
    to half the smallest gap.
    """
    out = []
    for name, means in (("2-arm", (0.9, 0.5)), ("5-arm", (0.9, 0.7, 0.6, 0.5, 0.3))):
        base = StationaryArmSet(means, name=f"{name}/L0")
        out.append(HarnessInstance(base, 0.0, b_max))
        gaps = base.gaps
        dmin = gaps[gaps > 0].min()
        lip = dmin / 2 / b_max
        best = int(np.argmax(means))
        trend = tuple(0.0 if i == best else lip * b_max for i in range(len(means)))
        out.append(HarnessInstance(StationaryArmSet(means, trend, name=f"{name}/Lhalf"), lip, b_max))
    return out


@dataclass
class RegretRow:
    instance: str
    T: int
    mode: str
    seed: str
    regret: float
    bound: Optional[float]

    def as_dict(self) -> Dict[str, object]:
        return {"instance": self.instance, "T": self.T, "mode": self.mode, "seed": self.seed,
                "regret": self.regret, "bound": "" if self.bound is None else self.bound}


@dataclass
class RegretReport:
    rows: List[RegretRow] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def means(self, mode: str = "sample-mean") -> List[RegretRow]:
        return [r for r in self.rows if r.mode == mode and r.seed == "mean"]

    @property
    def bound_held(self) -> bool:
        return all(r.bound is None or r.regret <= r.bound for r in self.means("sample-mean"))


def regret_report(instances: Iterable[HarnessInstance], seeds: Sequence[int],
                  checkpoints: Sequence[int] = (100, 1000, 10000),
                  params: Optional[BanditParams] = None,
                  modes: Sequence[str] = ("sample-mean", "decay")) -> RegretReport:
    """Seed-averaged pseudo-regret against the bound at each checkpoint horizon."""
    if not seeds:
        raise ValueError("at least one seed is required")
    params = BanditParams() if params is None else params
    report = RegretReport()
    for inst in instances:
        label = inst.arms.name or f"{inst.arms.n_arms}-arm"
        for horizon in checkpoints:
            try:
                bound = theorem1_bound(inst.arms, horizon, params.alpha_ucb, inst.lipschitz, inst.b_max)
            except VacuousBoundError as exc:
                bound = None
                note = f"{label} T={horizon}: {exc}"
                if note not in report.notes:
                    report.notes.append(note)
            for mode in modes:
                vals = []
                for s in seeds:
                    run = run_stationary(inst.arms, inst.k, horizon, params, s, mode)
                    r = float(empirical_regret(run, inst.arms)[-1])
                    vals.append(r)
                    report.rows.append(RegretRow(label, horizon, mode, str(s), r, bound))
                report.rows.append(RegretRow(label, horizon, mode, "mean", float(np.mean(vals)), bound))
    return report
