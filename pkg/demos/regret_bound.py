"""
Pseudo-regret of the bandit core against its closed-form bound
==============================================================

"""

from beamstream.regret import default_instances, regret_report

# stationary arms, no buffers: the same selection and update code as the scheduler
report = regret_report(default_instances(), seeds=range(20), checkpoints=(100, 1000, 10000),
                       modes=("sample-mean",))
for row in report.means("sample-mean"):
    print(f"{row.instance:12s} T={row.T:6d} regret {row.regret:8.2f}  bound {row.bound:8.2f}")
print("bound held:", report.bound_held)
