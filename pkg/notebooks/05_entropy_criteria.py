"""
Which functional deserves the name entropy?
===========================================

Candidate expressions are run through the operational checks: invariance
under permutations, growth under mixing, additivity, a unique maximum at
fixed energy, concavity, equal temperatures at a joint maximum, and so on.
Only -sum p ln p survives all of them.
"""

# %%
from seathermo import builtin_candidates, replay_counterexample, run_criteria

for cand in builtin_candidates():
    report = run_criteria(cand, levels := [0.0, 1.0, 2.0], trials=200, seed=0)
    print(report.table())
    for failure in report.failures():
        print(f"   check {failure.check} counterexample replays: {replay_counterexample(cand, failure)}")
    print()

# %%
# The JSON form is deterministic for a fixed seed.
a = run_criteria(builtin_candidates()[1], seed=5).to_json()
b = run_criteria(builtin_candidates()[1], seed=5).to_json()
print("byte-identical:", a == b)
