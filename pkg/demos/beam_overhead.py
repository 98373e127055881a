"""
Beam alignment overhead versus staleness
========================================

"""

# the overhead is the share of a slot lost to re-aligning the beam
import numpy as np
from beamstream.beam import overhead
from beamstream.config import BeamModelParams

stale = np.array([0, 10, 25, 49, 100, 200])
for shape in ("linear-saturating", "exponential-saturating"):
    tau = overhead(BeamModelParams(shape=shape), stale)
    print(f"{shape:24s}", "  ".join(f"{v:.3f}" for v in tau))

# a user served every 50 slots loses about a quarter of each slot
print("tau(49) =", overhead(BeamModelParams(), 49))
