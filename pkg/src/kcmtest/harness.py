"""Single-dataset tests, Monte Carlo studies and truncation sweeps.

One replication runs the whole pipeline: full-sample OLS, then

* fixed-kernel statistics (``gp``, ``icm`` and their ``:trc`` variants) on
  the whole sample with the median-heuristic or ``gamma = 0.5`` kernel;
* split-based statistics (``basic``, ``generic:*``, ``divergent:*``): random
  train/test partition, bandwidth selection on the projected training kernel,
  statistic on the projected testing kernel.

Critical values always come from the multiplier bootstrap. Every random
stream is derived from ``(master_seed, replication)`` so results do not depend
on the number of worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bootstrap import TestOutcome, bootstrap_distribution, make_outcome, multiplier_matrix
from .dgp import Dataset, DgpSpec, generate, split
from .exceptions import DataError, KCMError
from .kernel import KernelSpec, build_kernel_matrix, gamma_grid, median_heuristic
from .regression import fit_ols, project_kernel, projection_matrix, score_matrix
from .rng import derive_seed
from .selection import DEFAULT_LAMBDA, SelectionResult, select_kernel, truncation_level
from .spectral import eigendecompose
from .teststats import ICM_GAMMA, StatisticKind, parse_kind, stat_basic, stat_divergent, stat_generic, stat_gp
from .weights import generate_weights

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "SweepResult",
    "TABLE_COLUMNS",
    "run_single_test",
    "run_monte_carlo",
    "run_truncation_sweep",
    "emit_table",
    "parse_table",
    "read_csv_dataset",
]

log = logging.getLogger(__name__)

TABLE_COLUMNS = ("statistic", "N", "q", "dgp", "rejection_rate", "mean_gamma_star", "mean_J")


@dataclass(frozen=True)
class ExperimentConfig:
    dgp: DgpSpec | None = None
    kinds: tuple[StatisticKind, ...] = (StatisticKind("basic"),)
    select: str = "nasym"
    grid_size: int = 9
    lam: float = DEFAULT_LAMBDA
    tau: float = 0.11
    J: int | None = None
    split_frac: float = 0.15
    B: int = 500
    replications: int = 100
    alpha: float = 0.05
    master_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        kinds = tuple(parse_kind(k) if isinstance(k, str) else k for k in self.kinds)
        if not kinds:
            raise ValueError("at least one statistic is required")
        if len({k.token for k in kinds}) != len(kinds):
            raise ValueError("duplicate statistics in configuration")
        object.__setattr__(self, "kinds", kinds)
        if self.select not in ("nasym", "asym"):
            raise ValueError(f"unknown selection method {self.select!r}")
        if self.grid_size < 1 or self.B < 1 or self.replications < 1 or self.threads < 1:
            raise ValueError("grid_size, B, replications and threads must be positive")
        if not 0 < self.tau < 1 or not 0 < self.split_frac < 1 or not 0 < self.alpha < 1:
            raise ValueError("tau, split_frac and alpha must lie in (0, 1)")
        if self.J is not None and self.J < 1:
            raise ValueError("J must be at least 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kinds"] = [k.token for k in self.kinds]
        d["dgp"] = None if self.dgp is None else {"name": self.dgp.name, "id": self.dgp.id,
                                                  "q": self.dgp.q, "n": self.dgp.n}
        return d


@dataclass(frozen=True)
class Record:
    value: float
    p_value: float
    reject: bool
    gamma: float | None
    J: int


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: dict[str, list[Record | None]]
    failures: int = 0
    errors: list[str] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def replications(self) -> int:
        return self.config.replications

    def rejection_rate(self, kind) -> float:
        recs = self.records[str(kind)]
        return sum(1 for r in recs if r is not None and r.reject) / self.replications

    def values(self, kind) -> np.ndarray:
        return np.array([r.value for r in self.records[str(kind)] if r is not None])

    def p_values(self, kind) -> np.ndarray:
        return np.array([r.p_value for r in self.records[str(kind)] if r is not None])

    def rows(self) -> list[dict]:
        spec = self.config.dgp
        out = []
        for token, recs in self.records.items():
            ok = [r for r in recs if r is not None]
            gammas = [r.gamma for r in ok if r.gamma is not None]
            out.append({
                "statistic": token,
                "N": spec.n if spec else None,
                "q": spec.q if spec else None,
                "dgp": spec.name if spec else None,
                "rejection_rate": self.rejection_rate(token),
                "mean_gamma_star": float(np.mean(gammas)) if gammas else math.nan,
                "mean_J": float(np.mean([r.J for r in ok])) if ok else math.nan,
            })
        return out

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "failures": self.failures,
            "errors": self.errors,
            "wall_clock": self.wall_clock,
            "table": self.rows(),
            "records": {k: [None if r is None else asdict(r) for r in v] for k, v in self.records.items()},
        }


# -- single dataset --------------------------------------------------------


def _bootstrap_outcome(kind, stat, dec, P, eps, weights, J, config, V):
    dist = bootstrap_distribution(dec, P, eps, kind, weights, J, config.B, seed=0, multipliers=V)
    return make_outcome(stat, dist, config.alpha, kind)


def _fixed_kernel_outcomes(data, fit, kinds, config, seed, N):
    P = projection_matrix(score_matrix(fit))
    eps = fit.residuals
    eps_p = P.values @ eps
    V = multiplier_matrix(data.n, config.B, seed)
    out = {}
    decs = {}
    for kind in kinds:
        gamma = median_heuristic(data.X) if kind.name == "gp" else ICM_GAMMA
        if gamma not in decs:
            K = build_kernel_matrix(KernelSpec(gamma), data.X)
            dec = eigendecompose(project_kernel(P, K))
            decs[gamma] = (K, replace(dec, gamma=gamma))
        K, dec = decs[gamma]
        if kind.truncated:
            J = config.J if config.J is not None else truncation_level(config.tau, N, data.n)
            stat = stat_basic(dec, eps_p, J)
        else:
            J = data.n
            stat = stat_gp(K, P, eps)
        out[kind.token] = _bootstrap_outcome(kind, stat, dec, P, eps, None, J, config, V)
    return out


def _split_outcomes(data, fit, kinds, config, seed, N):
    train, test = split(data, config.split_frac, seed)
    G = score_matrix(fit)
    P_train = projection_matrix(G[train.index])
    P_test = projection_matrix(G[test.index])
    eps_train = fit.residuals[train.index]
    eps_test = fit.residuals[test.index]
    eps_p = P_test.values @ eps_test
    grid = gamma_grid(train.X, config.grid_size)
    V = multiplier_matrix(test.n, config.B, seed)

    selections: dict[tuple, SelectionResult] = {}
    decs = {}
    out = {}
    for kind in kinds:
        method = kind.select or config.select
        key = (method, kind.truncated)
        if key not in selections:
            J_sel = None if config.J is None or not kind.truncated else min(config.J, train.n)
            selections[key] = select_kernel(
                train.X, eps_train, P_train, grid, method, config.tau, N,
                truncated=kind.truncated, lam=config.lam, J=J_sel,
            )
        sel = selections[key]
        gamma = sel.chosen.gamma
        if gamma not in decs:
            K = build_kernel_matrix(sel.chosen, test.X)
            decs[gamma] = replace(eigendecompose(project_kernel(P_test, K)), gamma=gamma)
        dec = decs[gamma]
        if kind.truncated:
            J = config.J if config.J is not None else truncation_level(config.tau, N, test.n)
        else:
            J = test.n
        if J > test.n:
            raise DataError(f"J={J} exceeds the testing sample size {test.n}")
        weights = None
        if kind.name == "basic":
            stat = stat_basic(dec, eps_p, J)
        else:
            weights = generate_weights(kind.scheme, J, dec)
            fn = stat_generic if kind.name == "generic" else stat_divergent
            stat = fn(dec, eps_p, weights, J)
        stat.diagnostics["selection_J"] = sel.J
        out[kind.token] = _bootstrap_outcome(kind, stat, dec, P_test, eps_test, weights, J, config, V)
    return out


def run_single_test(data: Dataset, config: ExperimentConfig, seed: int | None = None) -> dict[str, TestOutcome]:
    """Run every statistic of ``config`` on one dataset.

    Returns a mapping from statistic token to its :class:`TestOutcome`.
    ``seed`` drives the split and the bootstrap multipliers (defaults to
    ``config.master_seed``).
    """
    seed = config.master_seed if seed is None else seed
    N = data.n
    fit = fit_ols(data.X, data.y)
    fixed = [k for k in config.kinds if not k.uses_split]
    splitk = [k for k in config.kinds if k.uses_split]
    out = {}
    if fixed:
        out.update(_fixed_kernel_outcomes(data, fit, fixed, config, seed, N))
    if splitk:
        out.update(_split_outcomes(data, fit, splitk, config, seed, N))
    return {k.token: out[k.token] for k in config.kinds}


# -- Monte Carlo -----------------------------------------------------------


def _replicate(config: ExperimentConfig, r: int):
    seed = derive_seed(config.master_seed, r)
    try:
        data = generate(config.dgp, seed)
        outcomes = run_single_test(data, config, seed)
    except KCMError as exc:
        return None, f"replication {r}: {exc}"
    recs = {}
    for token, o in outcomes.items():
        recs[token] = Record(o.statistic.value, o.p_value, o.reject, o.statistic.gamma_used, o.statistic.J_used)
    return recs, None


def run_monte_carlo(config: ExperimentConfig) -> ExperimentReport:
    """Repeat :func:`run_single_test` on fresh draws from ``config.dgp``."""
    if config.dgp is None:
        raise ValueError("a Monte Carlo study needs a DGP")
    t0 = time.perf_counter()
    reps = range(config.replications)
    if config.threads == 1:
        results = [_replicate(config, r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda r: _replicate(config, r), reps))
    records = {k.token: [] for k in config.kinds}
    errors = []
    for recs, err in results:
        if err is not None:
            errors.append(err)
            log.warning(err)
        for token in records:
            records[token].append(None if recs is None else recs[token])
    return ExperimentReport(config, records, len(errors), errors, time.perf_counter() - t0)


@dataclass
class SweepResult:
    J_values: list[int]
    reports: dict[int, ExperimentReport]
    skipped: list[tuple[int, str]]

    def to_csv(self) -> str:
        kinds = [] if not self.reports else list(next(iter(self.reports.values())).records)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["J", *kinds])
        for J in self.J_values:
            rep = self.reports[J]
            w.writerow([J, *(repr(rep.rejection_rate(k)) for k in kinds)])
        return buf.getvalue()


def run_truncation_sweep(config: ExperimentConfig, J_values) -> SweepResult:
    """Monte Carlo power at each truncation level, with the same seeds for every ``J``.

    Levels outside ``[1, n_test]`` are skipped and listed in ``skipped``.
    """
    if config.dgp is None:
        raise ValueError("a sweep needs a DGP")
    N = config.dgp.n
    n_test = N - int(np.floor(config.split_frac * N + 0.5))
    kept, skipped, reports = [], [], {}
    for J in J_values:
        J = int(J)
        if not 1 <= J <= n_test:
            msg = f"J={J} outside [1, {n_test}], skipped"
            log.warning(msg)
            skipped.append((J, msg))
            continue
        if J in reports:
            continue
        reports[J] = run_monte_carlo(replace(config, J=J))
        kept.append(J)
    return SweepResult(kept, reports, skipped)


# -- I/O -------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_table(reports, fmt: str = "csv") -> str:
    """Serialize one or more reports as a rejection-rate table.

    Columns are ``TABLE_COLUMNS`` in that order; floats are written with
    ``repr`` so they parse back exactly.
    """
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    rows = [row for rep in reports for row in rep.rows()]
    if fmt == "json":
        return json.dumps([{c: row[c] for c in TABLE_COLUMNS} for row in rows], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in TABLE_COLUMNS])
    return buf.getvalue()


def parse_table(text: str, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`emit_table`."""
    if fmt == "json":
        return json.loads(text)
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for c in TABLE_COLUMNS:
            v = rec[c]
            if c in ("statistic", "dgp"):
                row[c] = v or None
            elif c in ("N", "q"):
                row[c] = int(v) if v else None
            else:
                row[c] = float(v)
        rows.append(row)
    return rows


def read_csv_dataset(path_or_buffer) -> Dataset:
    """Read ``y, x1, ..., xq`` from a CSV file with a header row.

    Empty or non-numeric cells raise :class:`DataError` naming the data row
    (1-based, header excluded) and column.
    """
    if hasattr(path_or_buffer, "read"):
        text = path_or_buffer.read()
    else:
        with open(path_or_buffer, newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("CSV input is empty") from None
    if len(header) < 2:
        raise DataError("CSV needs a response column and at least one covariate")
    rows = []
    for i, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"row {i}: expected {len(header)} cells, got {len(row)}")
        vals = []
        for name, cell in zip(header, row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"row {i}, column {name!r}: non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise DataError(f"row {i}, column {name!r}: non-finite value {cell!r}")
            vals.append(v)
        rows.append(vals)
    if not rows:
        raise DataError("CSV has a header but no data rows")
    arr = np.array(rows)
    return Dataset(arr[:, 1:], arr[:, 0])
