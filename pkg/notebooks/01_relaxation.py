"""
Relaxation of a three-level gas
===============================

A nonequilibrium state of a dilute gas over levels (0, 1, 2) is pushed along
the direction of steepest entropy ascent. Energy and normalization stay
fixed, the entropy climbs, and the state settles on the canonical
distribution with the same energy.
"""

# %%
import numpy as np

from seathermo import IntegratorConfig, beta_from_energy, integrate, validate_state

levels = np.array([0.0, 1.0, 2.0])
p0 = validate_state([0.5, 0.2, 0.3])

traj = integrate(p0, levels, config=IntegratorConfig(t_end=10.0, sample_stride=100))

# %%
# One row per time unit (tau = 1).
print(f"{'t':>5} {'p1':>8} {'p2':>8} {'p3':>8} {'E':>8} {'S':>9} {'dS/dt':>10}")
for pt in traj.points:
    p = pt.state.probs
    print(f"{pt.t:5.1f} {p[0]:8.5f} {p[1]:8.5f} {p[2]:8.5f} {pt.energy:8.5f} {pt.entropy:9.6f} {pt.entropy_rate:10.2e}")

# %%
# The end point is the stable state at E = 0.8.
target = beta_from_energy(traj.energies[0], levels)
print("\nbeta(E)            :", target.beta)
print("canonical p        :", target.distribution.probs)
print("L_inf to canonical :", np.max(np.abs(traj.final.state.probs - target.distribution.probs)))

# %%
# Zero entries never move. On four levels with level 1 empty, the gas relaxes
# to a *partial* equilibrium: canonical over {0, 2, 3}, level 1 still empty.
# (With only two occupied levels there would be nothing to do: any such state
# is already canonical over its pair.)
four = np.array([0.0, 1.0, 2.0, 3.0])
q0 = validate_state([0.4, 0.0, 0.5, 0.1])
gap = integrate(q0, four, config=IntegratorConfig(t_end=20.0, sample_stride=500))
partial = beta_from_energy(gap.energies[0], four, support=[0, 2, 3])
print("\nlevel 1 over time    :", gap.probs[:, 1])
print("final state          :", gap.final.state.probs)
print("partial canonical    :", partial.distribution.probs)
