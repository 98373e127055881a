"""Per-user QoE and buffer-region classification."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import QoEParams, ResolutionClass

NORMAL, CRITICAL, HIGHLY_CRITICAL = 0, 1, 2
REGION_NAMES = ("normal", "critical", "highly_critical")


@dataclass(frozen=True)
class QoESample:
    value: float
    zero_hit: bool
    region: str


def qoe_values(b, offsets, params: QoEParams):
    """Vectorised QoE: resolution offset plus log buffer term, minus the zero-hit penalty."""
    b = np.asarray(b, dtype=float)
    z = (b == 0.0)
    offsets = np.asarray(offsets, dtype=float) if params.offset_enabled else 0.0
    return np.where(z, 0.0, offsets) + params.alpha_qoe * np.log1p(b) - params.gamma * z


def classify_region(b, critical_s: float = 15.0, highly_critical_s: float = 5.0):
    """Region code(s): 2 below ``highly_critical_s``, 1 below ``critical_s``, else 0."""
    b = np.asarray(b, dtype=float)
    r = np.where(b < highly_critical_s, HIGHLY_CRITICAL, np.where(b < critical_s, CRITICAL, NORMAL))
    return r if r.ndim else int(r)


def qoe(b: float, cls: ResolutionClass, params: QoEParams,
        critical_s: float = 15.0, highly_critical_s: float = 5.0) -> QoESample:
    value = float(qoe_values(b, cls.qoe_offset, params))
    return QoESample(value, b == 0.0, REGION_NAMES[classify_region(b, critical_s, highly_critical_s)])
