import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beamstream.config import BanditParams
from beamstream.regret import (HarnessInstance, StationaryArmSet, StationaryRun, VacuousBoundError,
                               default_instances, empirical_regret, regret_report, run_stationary,
                               theorem1_bound)

TWO = StationaryArmSet((0.9, 0.5))


def _bound_oracle(means, T, alpha, lip, bmax):
    best = max(means)
    total = 0.0
    for m in means:
        d = best - m
        if d == 0:
            continue
        total += 2 * alpha * math.log(T) / (d - lip * bmax) + 2 * alpha / (alpha - 1) * (d + lip * bmax)
    return total


def test_two_arm_bound_value():
    got = theorem1_bound(TWO, 10_000, 2.0, 0.0, 60.0)
    assert got == pytest.approx(93.70340371976182, rel=1e-12)
    assert got == pytest.approx(_bound_oracle((0.9, 0.5), 10_000, 2.0, 0.0, 60.0), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6, unique=True),
       st.integers(2, 10**6), st.floats(1.1, 5.0))
def test_bound_matches_oracle(means, T, alpha):
    got = theorem1_bound(StationaryArmSet(tuple(means)), T, alpha, 0.0, 60.0)
    assert got == pytest.approx(_bound_oracle(means, T, alpha, 0.0, 60.0), rel=1e-9)


def test_vacuous_bound():
    with pytest.raises(VacuousBoundError):
        theorem1_bound(TWO, 1000, 2.0, 0.4 / 60.0, 60.0)
    with pytest.raises(ValueError):
        theorem1_bound(TWO, 1000, 1.0, 0.0, 60.0)


def test_pseudo_regret_accounting():
    run = StationaryRun(pulls=np.ones((100, 1), dtype=int), rewards=np.zeros((100, 1)), counts=np.array([0, 100]))
    assert empirical_regret(run, TWO)[-1] == pytest.approx(40.0)


def test_single_slot():
    run = run_stationary(TWO, 1, 1, BanditParams(), 0, "sample-mean")
    assert empirical_regret(run, TWO)[-1] <= theorem1_bound(TWO, 1, 2.0, 0.0, 60.0)


def test_identical_arms_zero_regret():
    arms = StationaryArmSet((0.5, 0.5, 0.5))
    run = run_stationary(arms, 1, 500, BanditParams(), 3, "sample-mean")
    assert empirical_regret(run, arms)[-1] == 0.0


@pytest.mark.parametrize("mode", ["sample-mean", "decay"])
def test_counts_consistent(mode):
    run = run_stationary(StationaryArmSet((0.9, 0.7, 0.3)), 2, 300, BanditParams(), 1, mode)
    assert run.counts.sum() == 600
    np.testing.assert_array_equal(run.counts, np.bincount(run.pulls.ravel(), minlength=3))
    assert all(len(set(row)) == 2 for row in run.pulls.tolist())


def test_sample_mean_regret_grows_logarithmically():
    r = np.mean([empirical_regret(run_stationary(TWO, 1, 10_000, BanditParams(), s, "sample-mean"), TWO)
                 for s in range(10)], axis=0)
    # ten times the horizon should cost far less than ten times the regret
    assert r[9_999] / r[999] < 2.5
    assert r[9_999] <= theorem1_bound(TWO, 10_000, 2.0, 0.0, 60.0)


def test_deterministic_rewards_tail_is_sparse():
    arms = StationaryArmSet((0.9, 0.5), noise="none")
    r = empirical_regret(run_stationary(arms, 1, 5000, BanditParams(), 0, "sample-mean"), arms)
    assert r[-1] - r[999] < r[999]
    assert r[-1] <= theorem1_bound(arms, 5000, 2.0, 0.0, 60.0)


def test_invalid_arms():
    with pytest.raises(ValueError):
        StationaryArmSet((1.2, 0.5))
    with pytest.raises(ValueError):
        StationaryArmSet((0.9, 0.5), trend=(0.0,))
    with pytest.raises(ValueError):
        run_stationary(TWO, 3, 10, BanditParams(), 0)


def test_default_instances_have_finite_bounds():
    for inst in default_instances():
        assert theorem1_bound(inst.arms, 1000, 2.0, inst.lipschitz, inst.b_max) > 0


def test_report_structure_and_vacuous_note():
    vac = HarnessInstance(StationaryArmSet((0.9, 0.5), name="tight"), lipschitz=0.5 / 60.0)
    rep = regret_report([vac, default_instances()[0]], seeds=[0, 1], checkpoints=(100,))
    assert len(rep.rows) == 2 * 2 * 3
    assert any("tight" in n for n in rep.notes)
    means = rep.means("sample-mean")
    assert [r.bound is None for r in means] == [True, False]
    assert rep.bound_held
    with pytest.raises(ValueError):
        regret_report(default_instances(), seeds=[])
