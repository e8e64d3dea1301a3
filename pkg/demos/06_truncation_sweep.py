"""
Power across truncation levels
==============================

The sweep reuses the same seeds at every level, so differences between rows
come from the truncation alone. The CSV is ready for any plotting tool.
"""

# %%
from kcmtest.dgp import DgpSpec
from kcmtest.harness import ExperimentConfig, run_truncation_sweep

config = ExperimentConfig(dgp=DgpSpec(4, 10, 200), kinds=("basic", "divergent:equal"), B=200, replications=60)
sweep = run_truncation_sweep(config, [1, 5, 11, 22, 44, 88, 400])
print(sweep.to_csv())
print("skipped:", sweep.skipped)
