"""
The energy-entropy diagram
==========================

Every state of the gas maps to a point (E, S). The points fill the region
between S = 0 and the concave stable-state boundary S_max(E). This script
samples the boundary, scatters random states under it and writes an SVG.
"""

# %%
from pathlib import Path

import numpy as np

from seathermo import concavity_violation, smax_curve, state_point
from seathermo.cli import diagram_svg
from seathermo.statespace import random_states

levels = [0.0, 1.0, 2.0]
curve = smax_curve(levels, n_samples=512)
print("peak (E, S)        :", curve.peak, " ln 3 =", np.log(3))
print("concavity excess   :", concavity_violation(curve))

# %%
rng = np.random.default_rng(0)
pts = np.array([state_point(s, levels) for s in random_states(3, 5000, rng)])
print("max S - S_max(E)   :", np.max(pts[:, 1] - curve.smax(pts[:, 0])))

# %%
# A few rows of the boundary: beta runs from +20 down to -20 across the range.
for row in curve.samples[::64]:
    print("E={:.6f}  S={:.6f}  beta={:+.3f}".format(*row))

out = Path("energy_entropy.svg")
out.write_text(diagram_svg(curve))
print("\nwrote", out.resolve())
