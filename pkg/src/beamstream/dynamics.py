"""Transmission, reception and playback-buffer recursions.

All quantities are in seconds of playable video; a slot lasts one second.
"""
from __future__ import annotations

import numpy as np

from .config import ChannelParams


def transmitted_seconds(tau, link_rate, bitrate):
    """Seconds of video pushed to a user during the data phase of one slot."""
    return (1.0 - np.asarray(tau, dtype=float)) * link_rate / np.asarray(bitrate, dtype=float)


def draw_success(channel: ChannelParams, rng: np.random.Generator, size=None):
    """Reception probability, i.i.d. uniform on ``[p_lo, p_hi]``."""
    if channel.p_lo == channel.p_hi:
        return channel.p_lo if size is None else np.full(size, float(channel.p_lo))
    return rng.uniform(channel.p_lo, channel.p_hi, size=size)


def step_buffer(b, scheduled, received, cap=np.inf):
    """True buffer after one slot: drain one second, add what arrived, clamp at ``cap``."""
    b = np.asarray(b, dtype=float)
    out = np.minimum(cap, np.maximum(b - 1.0, 0.0) + np.asarray(scheduled) * np.asarray(received, dtype=float))
    return out if out.ndim else float(out)


def step_estimate(bhat, scheduled, transmitted, cap=np.inf):
    """Server-side buffer estimate; same recursion fed with transmitted seconds."""
    return step_buffer(bhat, scheduled, transmitted, cap)
