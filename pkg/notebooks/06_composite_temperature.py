"""
Two systems in contact
======================

Share a fixed total energy between a two-level and a three-level system so
that the combined entropy is largest. At the optimum the two temperatures
agree, which is what makes temperature a meaningful equilibrium property.
"""

# %%
import numpy as np

from seathermo import beta_from_energy, composite_temperature_check

A, B, E_total = [0.0, 1.0], [0.0, 1.0, 2.0], 1.2
res = composite_temperature_check(A, B, E_total)
print(res)
print("|1/T_A - 1/T_B| =", abs(1 / res.T_A - 1 / res.T_B))

# %%
# The total entropy along the split, for intuition.
for EA in np.linspace(0.1, 0.9, 9):
    S = beta_from_energy(EA, A).entropy + beta_from_energy(E_total - EA, B).entropy
    print(f"E_A={EA:.1f}  S_total={S:.6f}")
