"""
Canonical states and temperature
================================

Inverting E(beta) for a bounded spectrum. Above the spectral mean the
temperature is negative; at the mean it is infinite; the ends of the range
are the zero-temperature states.
"""

# %%
import math

import numpy as np

from seathermo import beta_from_energy, is_equilibrium, partition_function, validate_state

two = [0.0, 1.0]
sol = beta_from_energy(0.25, two)
print("two-level, E = 0.25: beta =", sol.beta, " ln 3 =", math.log(3))

# %%
levels = [0.0, 1.0, 2.0]
for E in (0.0, 0.2, 0.8, 1.0, 1.2, 1.8, 2.0):
    s = beta_from_energy(E, levels)
    print(f"E={E:3.1f}  beta={s.beta:+9.4f}  T={s.temperature:+9.4f}  S={s.entropy:.5f}  p={np.round(s.distribution.probs, 4)}")

# %%
# Large |beta| is harmless: exponentials are taken relative to the nearest level.
pf = partition_function(-5000.0, levels)
print("\nln Z at beta=-5000:", pf.log_value, " (Z itself overflows:", pf.value, ")")

# %%
# Stable, partial, or neither.
for p in ([0.6652, 0.2447, 0.0900], [0.75, 0.0, 0.25], [0.5, 0.2, 0.3]):
    print(p, "->", is_equilibrium(validate_state(p, strict=False), levels, tol=1e-3).value)
