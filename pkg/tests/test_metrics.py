import numpy as np
import pytest

from beamstream import metrics as M
from beamstream.beam import overhead
from beamstream.config import DEFAULT, ChannelParams
from beamstream.engine import run_episode, run_experiment


@pytest.fixture(scope="module")
def rr200():
    return run_experiment(DEFAULT.replace(seeds=(0, 1)), "rr")


def test_single_user_curve_equals_trace():
    cfg = DEFAULT.replace(n_users=1, k_rf=1, horizon=40, population=("1080p",))
    tr = run_episode(cfg, "b2p", 0)
    curve = M.qoe_curves([tr])["1080p"]
    np.testing.assert_array_equal(curve.mean, tr.qoe[:, 0])
    assert np.all(curve.std == 0)


def test_symmetric_users_zero_std():
    cfg = DEFAULT.replace(n_users=2, k_rf=2, horizon=40, channel=ChannelParams(1.0, 1.0),
                          population=("720p", "720p"))
    curve = M.qoe_curves([run_episode(cfg, "rr", 0)])["720p"]
    assert np.all(curve.std == 0)


def test_unknown_class_label(rr200):
    with pytest.raises(KeyError):
        M.qoe_curves(rr200, ["8K"])


def test_zero_hit_only_first_slot_when_everyone_served():
    cfg = DEFAULT.replace(n_users=10, k_rf=10, horizon=100, link_rate=1e6, channel=ChannelParams(1.0, 1.0))
    traces = run_experiment(cfg.replace(seeds=(0,)), "rr")
    # buffers are filled in slot 1 and never drain
    assert M.zero_hit_fraction(traces) == 0.0
    starved = run_experiment(cfg.replace(seeds=(0,), channel=ChannelParams(0.0, 0.0)), "rr")
    assert M.zero_hit_fraction(starved) == 1.0


def test_exit_times():
    cfg = DEFAULT.replace(n_users=1, k_rf=1, horizon=30, link_rate=80.0, population=("2160p",),
                          channel=ChannelParams(1.0, 1.0))
    tr = run_episode(cfg, "rr", 0)
    # hand-built trace: 2 s in at slot 1, growing by about 0.9 s each slot afterwards
    tr.buffer[:, 0] = np.arange(1, 31, dtype=float) * (15 / 9)
    assert M.exit_times(tr, 15.0)[0] == 9
    tr.buffer[:, 0] = 3.0
    assert M.exit_times(tr, 15.0)[0] == np.inf


def test_rr_overhead_constant_after_rotation(rr200):
    raw = M.overhead_moving_average(rr200, window=1)
    steady = raw.mean[50:]
    assert np.all(steady == overhead(DEFAULT.beam, 49))
    assert overhead(DEFAULT.beam, 49) == pytest.approx(0.246)


def test_trailing_mean():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(M.trailing_mean(x, 2), [1.0, 1.5, 2.5, 3.5])
    np.testing.assert_array_equal(M.trailing_mean(x, 1), x)
    with pytest.raises(ValueError):
        M.trailing_mean(x, 0)


def test_rr_intervals_are_rotation_length(rr200):
    for st in M.schedule_intervals(rr200).values():
        assert st.mean == 50 and st.std == 0 and st.censored_users == 0


def test_single_user_interval_one():
    cfg = DEFAULT.replace(n_users=1, k_rf=1, horizon=20, population=("360p",))
    assert M.schedule_intervals([run_episode(cfg, "b2p", 0)])["360p"].mean == 1


def test_rr_staleness_single_spike(rr200):
    h = M.staleness_histogram(rr200)
    assert h.sum() == sum(tr.scheduled.sum() for tr in rr200)
    assert M.local_modes(h) == [49]
    assert h.argmax() == 49


def test_uniform_staleness_is_geometric():
    cfg = DEFAULT.replace(n_users=20, k_rf=2, horizon=20000, seeds=(0,))
    h = M.staleness_histogram(run_experiment(cfg, "uniform"))
    l = np.arange(len(h))
    mean = (h * l).sum() / h.sum()
    # steady state of uniform sampling: P(l) = q (1-q)^l with q = K/N, mean (1-q)/q
    q = 2 / 20
    assert mean == pytest.approx((1 - q) / q, rel=0.03)
    expected = h.sum() * q * (1 - q) ** l[:20]
    np.testing.assert_allclose(h[:20], expected, rtol=0.08)


def test_local_modes():
    assert M.local_modes(np.array([0, 1, 5, 1, 0, 0, 0, 0, 0, 0, 0, 3, 0])) == [2, 11]
    assert M.local_modes(np.array([4, 4, 4, 4])) == []
