"""
Maxwell's demon and available energy
====================================

Can energy be taken out of a system at fixed volume without lowering its
entropy? Only if a state of lower energy and no lower entropy exists. For a
stable state on the positive-temperature branch there is none. For any
nonequilibrium state there is, and the checker hands back one such state.
"""

# %%
from seathermo import (
    IntegratorConfig,
    ReservoirSpec,
    adiabatic_availability,
    available_energy,
    beta_from_energy,
    demon_check,
    integrate,
    smax_curve,
    state_point,
    validate_state,
)

levels = [0.0, 1.0, 2.0]
curve = smax_curve(levels)

stable = beta_from_energy(0.6, levels)
print("stable state, beta > 0  :", demon_check(stable.energy, stable.entropy, curve))

s = validate_state([0.2, 0.6, 0.2])
E0, S0 = state_point(s, levels)
v = demon_check(E0, S0, curve)
print(f"\ninterior state (E={E0:.4f}, S={S0:.4f}): feasible={v.feasible}, branch={v.branch}")
print(f"witness E={v.witness_energy:.4f}, S={v.witness_entropy:.4f}, p={v.witness.probs}")

hot = beta_from_energy(1.7, levels)
print("\nstable state, beta < 0  :", demon_check(hot.energy, hot.entropy, curve).branch,
      demon_check(hot.energy, hot.entropy, curve).feasible)

# %%
# Adiabatic availability: drop in energy at constant entropy.
print("\nadiabatic availability of the interior state:", adiabatic_availability(E0, S0, curve))

# %%
# Available energy against a reservoir drains away as the state relaxes.
res = ReservoirSpec(temperature_R=1.0)
traj = integrate(validate_state([0.6, 0.1, 0.3]), levels, config=IntegratorConfig(t_end=6.0, sample_stride=100))
for pt in traj.points:
    print(f"t={pt.t:3.1f}  Omega={available_energy(pt.energy, pt.entropy, res, levels):.6f}")
