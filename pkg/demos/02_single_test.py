"""
Testing a linear model on one dataset
=====================================

Draw one sample from a misspecified design, write it to CSV and run the
whole pipeline on the file, exactly as ``kcmtest test`` would.
"""

# %%
import json
import tempfile
from pathlib import Path

import numpy as np

from kcmtest.dgp import DgpSpec, generate
from kcmtest.harness import ExperimentConfig, read_csv_dataset, run_single_test

data = generate(DgpSpec(4, q=10, n=200), seed=3)
path = Path(tempfile.mkdtemp()) / "sample.csv"
header = "y," + ",".join(f"x{i + 1}" for i in range(data.q))
np.savetxt(path, np.column_stack([data.y, data.X]), delimiter=",", header=header, comments="")

# %%
config = ExperimentConfig(kinds=("basic", "gp", "gp:trc", "generic:basel", "divergent:equal"), B=500)
outcomes = run_single_test(read_csv_dataset(path), config, seed=0)
for token, o in outcomes.items():
    print(f"{token:<16} value {o.statistic.value:9.4f}  p {o.p_value:.3f}  reject {o.reject}")

# %%
# Every outcome carries its diagnostics, including the per-direction table.
print(json.dumps(outcomes["basic"].to_dict(), indent=1)[:600])
