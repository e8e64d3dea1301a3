"""Kernel conditional moment specification tests with spectral truncation,
signal-to-noise bandwidth selection and a multiplier bootstrap."""

from .bootstrap import TestOutcome, bootstrap_distribution, critical_value, draw_multipliers, p_value
from .dgp import Dataset, DgpSpec, generate, split
from .exceptions import DataError, KCMError, NumericalError
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_table,
    read_csv_dataset,
    run_monte_carlo,
    run_single_test,
    run_truncation_sweep,
)
from .kernel import KernelSpec, build_kernel_matrix, gamma_grid, median_heuristic
from .regression import fit_ols, project_kernel, projection_matrix
from .selection import select_kernel
from .spectral import directional_components, eigendecompose, truncate
from .teststats import StatisticKind, parse_kind
from .weights import WeightScheme, parse_scheme

__version__ = "0.1.0"
