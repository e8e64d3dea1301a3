"""
Size and power by simulation
============================

A short Monte Carlo study. Rates are noisy at 100 replications; the
acceptance suite runs 500.
"""

# %%
from kcmtest.dgp import DgpSpec
from kcmtest.harness import ExperimentConfig, emit_table, run_monte_carlo

kinds = ("basic", "gp", "gp:trc", "icm", "icm:trc")
reports = [
    run_monte_carlo(ExperimentConfig(dgp=DgpSpec(d, 10, 200), kinds=kinds, B=200, replications=100))
    for d in (1, 4)
]
print(emit_table(reports))

# %%
for rep in reports:
    print(f"{rep.config.dgp.name}: {rep.wall_clock:.1f}s, {rep.failures} failed replications")
