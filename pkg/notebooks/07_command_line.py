"""
Driving the command line
========================

Every computation above is also reachable through ``seathermo <command>``.
This script calls the same entry point in-process with the sample configs
in ``configs/`` and writes the outputs under ``out/``.
"""

# %%
from pathlib import Path

from seathermo.cli import main

here = Path(__file__).parent
out = Path("out")

steps = [
    ["simulate", "--config", here / "configs" / "three_level.json", "--out", out / "three_level.csv"],
    ["simulate", "--config", here / "configs" / "random_ten_level.json", "--seed", "7", "--out", out / "ten.csv"],
    ["sweep", "--config", here / "configs" / "tau_sweep.json", "--out", out / "sweep", "--jobs", "2"],
    ["equilibrium", "--levels", "0,1", "--energy", "0.25", "--out", out / "equilibrium.json"],
    ["diagram", "--levels", "0,1,2", "--out", out / "diagram.csv", "--svg", out / "diagram.svg"],
    ["demon", "--levels", "0,1,2", "--state", "0.2,0.6,0.2", "--out", out / "demon.json"],
    ["criteria", "--candidate", "tsallis", "--q", "2", "--out", out / "tsallis.json"],
]
for argv in steps:
    code = main([str(a) for a in argv])
    print("exit", code, ":", " ".join(map(str, argv)))

print((out / "three_level.json").read_text())
