"""
Bandit scheduling against uniform and round-robin baselines
===========================================================

"""

from beamstream import metrics
from beamstream.config import DEFAULT
from beamstream.engine import run_experiment

traces = {s: run_experiment(DEFAULT, s) for s in ("b2p", "uniform", "rr")}

# starvation: share of slots with an empty buffer, averaged over 10 seeds
for s, tr in traces.items():
    print(f"{s:8s} zero-hit {metrics.zero_hit_fraction(tr):.4f}")

# overhead: RR settles at tau(N/K - 1) once every user has been served
for s, tr in traces.items():
    ma = metrics.overhead_moving_average(tr, window=50)
    print(f"{s:8s} overhead (50-slot mean at t=500) {ma.mean[-1]:.3f}")

# the bandit visits high-bitrate users more often
for name, st in metrics.schedule_intervals(traces["b2p"]).items():
    print(f"{name:6s} mean gap {st.mean:6.2f} slots")

# two populations of service gaps show up as separate modes
print("b2p staleness modes", metrics.local_modes(metrics.staleness_histogram(traces["b2p"])))
print("rr  staleness modes", metrics.local_modes(metrics.staleness_histogram(traces["rr"])))
