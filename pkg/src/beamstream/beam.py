"""Beam-alignment overhead as a function of beam staleness."""
from __future__ import annotations

import numpy as np

from .config import BeamModelParams


def overhead(params: BeamModelParams, l):
    """Fraction of a slot spent aligning the beam after ``l`` idle slots.

    Works on scalars and arrays. Both shapes start at ``tau_min`` for a
    freshly served user and never exceed ``tau_max``.
    """
    l = np.asarray(l, dtype=float)
    span = params.tau_max - params.tau_min
    if params.shape == "linear-saturating":
        tau = params.tau_min + span * np.minimum(1.0, l / params.l_full)
    elif params.shape == "exponential-saturating":
        tau = params.tau_max - span * np.exp(-l / (params.l_full / 3.0))
    else:
        raise ValueError(f"unknown overhead shape {params.shape!r}")
    return tau if tau.ndim else float(tau)
