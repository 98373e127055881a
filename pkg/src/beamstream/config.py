"""Domain records, experiment configuration, validation and presets."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

SHAPES = ("linear-saturating", "exponential-saturating")


@dataclass(frozen=True)
class ResolutionClass:
    name: str
    bitrate: float  # Mbps
    fraction: float
    qoe_offset: float = 0.0


@dataclass(frozen=True)
class BeamModelParams:
    tau_min: float = 0.05
    tau_max: float = 0.45
    l_full: float = 100
    shape: str = "linear-saturating"


@dataclass(frozen=True)
class QoEParams:
    alpha_qoe: float = 1.0
    gamma: float = 5.0
    offset_enabled: bool = True


@dataclass(frozen=True)
class ChannelParams:
    p_lo: float = 0.8
    p_hi: float = 1.0

    @property
    def mean(self) -> float:
        return 0.5 * (self.p_lo + self.p_hi)


@dataclass(frozen=True)
class BanditParams:
    alpha_ucb: float = 2.0
    lambda0: float = 0.5
    trend_wb: float = 5.0
    trend_wtau: float = 1.0


TABLE1_CLASSES = (
    ResolutionClass("2160p", 40.0, 0.05, 1.0),
    ResolutionClass("1440p", 16.0, 0.10, 0.8),
    ResolutionClass("1080p", 8.0, 0.40, 0.6),
    ResolutionClass("720p", 5.0, 0.30, 0.4),
    ResolutionClass("480p", 2.5, 0.10, 0.2),
    ResolutionClass("360p", 1.0, 0.05, 0.1),
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Closed description of one simulated cell.

    ``population`` optionally pins the class of every user by name; when it is
    ``None`` the classes are apportioned from ``classes[*].fraction``.
    """

    n_users: int = 200
    k_rf: int = 4
    horizon: int = 500
    link_rate: float = 2000.0
    buffer_cap: float = 60.0
    classes: tuple = TABLE1_CLASSES
    beam: BeamModelParams = field(default_factory=BeamModelParams)
    qoe: QoEParams = field(default_factory=QoEParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    bandit: BanditParams = field(default_factory=BanditParams)
    seeds: tuple = tuple(range(10))
    critical_s: float = 15.0
    highly_critical_s: float = 5.0
    population: Optional[tuple] = None

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def class_index(self, name: str) -> int:
        for i, c in enumerate(self.classes):
            if c.name == name:
                return i
        raise KeyError(f"unknown resolution class {name!r}")

    def to_dict(self) -> Dict[str, Any]:
        d = dataclasses.asdict(self)
        d["classes"] = [dict(c) for c in d["classes"]]
        d["seeds"] = list(self.seeds)
        d["population"] = None if self.population is None else list(self.population)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        sub = {"beam": BeamModelParams, "qoe": QoEParams,
               "channel": ChannelParams, "bandit": BanditParams}
        for key, typ in sub.items():
            if key in d and not isinstance(d[key], typ):
                d[key] = typ(**d[key])
        if "classes" in d:
            d["classes"] = tuple(c if isinstance(c, ResolutionClass) else ResolutionClass(**c)
                                 for c in d["classes"])
        if "seeds" in d:
            d["seeds"] = tuple(int(s) for s in d["seeds"])
        if d.get("population") is not None:
            d["population"] = tuple(d["population"])
        return cls(**d)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def dumps(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=False)


def loads(text: str) -> ExperimentConfig:
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError("config file must contain a mapping")
    return ExperimentConfig.from_dict(data)


def load(path) -> ExperimentConfig:
    return loads(Path(path).read_text())


def save(config: ExperimentConfig, path) -> None:
    Path(path).write_text(dumps(config))


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def validate(config: ExperimentConfig) -> List[Violation]:
    """Check every invariant of the configuration records.

    Returns an empty list for a valid config; never raises on bad values.
    """
    out: List[Violation] = []

    def check(ok: bool, name: str, rule: str) -> None:
        if not ok:
            out.append(Violation(name, rule))

    c = config
    check(c.n_users >= 1, "n_users", "must be >= 1")
    check(c.k_rf >= 1, "k_rf", "must be >= 1")
    check(c.k_rf <= c.n_users, "k_rf", "must be <= n_users")
    check(c.horizon >= 1, "horizon", "must be >= 1")
    check(c.link_rate > 0, "link_rate", "must be > 0")
    check(c.buffer_cap > 0, "buffer_cap", "must be > 0")
    check(c.highly_critical_s > 0, "highly_critical_s", "must be > 0")
    check(c.critical_s > c.highly_critical_s, "critical_s", "must exceed highly_critical_s")
    check(len(c.seeds) > 0, "seeds", "must be non-empty")

    check(len(c.classes) > 0, "classes", "at least one resolution class required")
    names = [k.name for k in c.classes]
    check(len(set(names)) == len(names), "classes.name", "class names must be unique")
    for k in c.classes:
        check(k.bitrate > 0, "classes.bitrate", f"{k.name}: must be > 0")
        check(0 <= k.fraction <= 1, "classes.fraction", f"{k.name}: must lie in [0, 1]")
        check(k.qoe_offset >= 0, "classes.qoe_offset", f"{k.name}: must be >= 0")
    if c.classes:
        total = math.fsum(k.fraction for k in c.classes)
        check(abs(total - 1.0) <= 1e-9, "classes.fraction", f"fractions sum to {total!r}, not 1")
        by_rate = sorted(c.classes, key=lambda k: k.bitrate)
        mono = all(a.qoe_offset <= b.qoe_offset for a, b in zip(by_rate, by_rate[1:]))
        check(mono, "classes.qoe_offset", "must be non-decreasing in bitrate")

    b = c.beam
    check(0 <= b.tau_min < b.tau_max < 1, "beam.tau_min/tau_max", "need 0 <= tau_min < tau_max < 1")
    check(b.l_full >= 1, "beam.l_full", "must be >= 1")
    check(b.shape in SHAPES, "beam.shape", f"must be one of {SHAPES}")

    check(c.qoe.alpha_qoe > 0, "qoe.alpha_qoe", "must be > 0")
    check(c.qoe.gamma >= 0, "qoe.gamma", "must be >= 0")

    ch = c.channel
    check(0 <= ch.p_lo <= ch.p_hi <= 1, "channel.p_lo/p_hi", "need 0 <= p_lo <= p_hi <= 1")

    bp = c.bandit
    check(bp.alpha_ucb > 1, "bandit.alpha_ucb", "must be > 1")
    check(0 < bp.lambda0 <= 1, "bandit.lambda0", "must lie in (0, 1]")
    check(bp.trend_wb >= 0, "bandit.trend_wb", "must be >= 0")
    check(bp.trend_wtau >= 0, "bandit.trend_wtau", "must be >= 0")

    if c.population is not None:
        check(len(c.population) == c.n_users, "population", "length must equal n_users")
        bad = sorted(set(c.population) - set(names))
        check(not bad, "population", f"unknown class names {bad}")
    return out


class ConfigError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def ensure_valid(config: ExperimentConfig) -> None:
    violations = validate(config)
    if violations:
        raise ConfigError(violations)


def apportion(fractions: Sequence[float], bitrates: Sequence[float], n: int) -> List[int]:
    """Largest-remainder apportionment of ``n`` users; ties go to higher bitrate."""
    quotas = [round(f * n, 9) for f in fractions]
    counts = [int(math.floor(q)) for q in quotas]
    left = n - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), -bitrates[i], i))
    for i in order[:left]:
        counts[i] += 1
    return counts


def build_population(config: ExperimentConfig) -> np.ndarray:
    """Class index for each user id.

    Apportioned users are laid out in blocks following the order of
    ``config.classes``.
    """
    if config.population is not None:
        return np.array([config.class_index(name) for name in config.population], dtype=int)
    counts = apportion([k.fraction for k in config.classes],
                       [k.bitrate for k in config.classes], config.n_users)
    return np.repeat(np.arange(len(config.classes)), counts)


def feasibility_report(config: ExperimentConfig) -> Dict[str, Any]:
    from .beam import overhead

    demand = config.n_users * math.fsum(k.fraction * k.bitrate for k in config.classes)
    tau_bar = float(overhead(config.beam, config.n_users / config.k_rf))
    capacity = config.k_rf * config.link_rate * (1.0 - tau_bar)
    return {"demand_mbps": demand, "capacity_mbps": capacity, "feasible": demand <= capacity}


# --------------------------------------------------------------------------
# Presets
# --------------------------------------------------------------------------
DEFAULT = ExperimentConfig()

_FIG_SWEEP_N = (50, 100, 200, 400)


def _presets() -> Dict[str, List[ExperimentConfig]]:
    no_offset = QoEParams(offset_enabled=False)
    p: Dict[str, List[ExperimentConfig]] = {
        "default-table1": [DEFAULT],
        "table1": [DEFAULT],
        "fig3": [DEFAULT.replace(qoe=no_offset)],
        "fig5": [DEFAULT.replace(n_users=n) for n in (100, 200, 400, 650)],
        "fig6": [DEFAULT],
        "fig7": [DEFAULT],
        "fig8": [DEFAULT],
    }
    for k in (4, 8, 16):
        p[f"fig4-k{k}"] = [DEFAULT.replace(n_users=n, k_rf=k) for n in _FIG_SWEEP_N]
    return p


PRESETS = _presets()


def preset(name: str) -> List[ExperimentConfig]:
    try:
        return list(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
