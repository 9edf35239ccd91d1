"""How risk grows as a block is pushed past the edge of the one below.

The quasi-static check says a top cube stands while its centre stays over
the base (offset < 0.5).  Placement noise blurs that edge: near the
boundary a fraction of the jittered copies fall, and more noise widens the
band of uncertain offsets.
"""

import numpy as np

from blockplan import Block, Scene, estimate_risk, simulate, static_stable

offsets = np.round(np.arange(0.30, 0.61, 0.05), 2)
sigmas = (0.05, 0.065, 0.1)

print("offset  stable  falls  " + "  ".join(f"R(s={s})" for s in sigmas))
for dx in offsets:
    scene = Scene((Block("base", position=(0, 0, 0.5)), Block("top", position=(dx, 0, 1.5))))
    risks = [estimate_risk(scene, s, N=60, seed=1).risk for s in sigmas]
    print(f"{dx:6.2f}  {static_stable(scene)!s:6s}  {simulate(scene).fell!s:5s}  "
          + "  ".join(f"{r:9.2f}" for r in risks))
