"""
One streaming episode under the bandit scheduler
================================================

"""

import numpy as np
from beamstream import metrics
from beamstream.config import DEFAULT, feasibility_report
from beamstream.engine import run_episode

# 200 users, 4 RF chains, 500 one-second slots
print(feasibility_report(DEFAULT))
tr = run_episode(DEFAULT, "b2p", seed=0)

# buffers start empty; watch the 4K users climb out of the critical band
uhd = tr.class_index == DEFAULT.class_index("2160p")
exits = metrics.exit_times(tr, DEFAULT.critical_s)[uhd]
print("2160p users past 15 s by slot", int(exits.max()))

for name, curve in metrics.qoe_curves([tr]).items():
    print(f"{name:6s} mean QoE at t=100: {curve.mean[99]:6.3f}   t=500: {curve.mean[-1]:6.3f}")

print("zero-hit fraction", round(metrics.zero_hit_fraction([tr]), 4))
print("estimate never below the true buffer:", bool(np.all(tr.buffer_est >= tr.buffer)))
