"""Seeded Monte Carlo sweeps over the consensus dynamics, with CSV/JSON output.

A sweep is a grid over (operator, n, r, sigma, consensus-enabled).  Every run
gets its own seed derived from the root seed and the cell/run indices, so
results are reproducible run-by-run and independent of worker count; adding
grid points never perturbs existing cells.  Aggregation is a deterministic
reduction ordered by cell key and run index, so parallel execution produces
byte-identical output files.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .simulation import (
    RunResult,
    SimConfig,
    population_mean_bel,
    population_mean_pl,
    run,
)

WORKERS_ENV_VAR = "DSTCONS_WORKERS"

# Stable operator identifiers used in seed derivation; never reorder.
OPERATOR_IDS = {"dempster": 0, "dubois_prade": 1, "yager": 2, "average": 3}

SUMMARY_COLUMNS = (
    "operator,n,k,r,sigma,consensus,runs,mean_bel_best,std_bel_best,"
    "converged_fraction,mean_conv_iter,std_conv_iter"
)


class ConfigError(ValueError):
    """A sweep config file or CLI parameter set is malformed."""


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for a Monte Carlo sweep."""

    operators: tuple[str, ...]
    n_values: tuple[int, ...] = (3,)
    k: int = 100
    r_values: tuple[float, ...] = (0.05,)
    sigma_values: tuple[float, ...] = (0.1,)
    runs_per_cell: int = 30
    max_iterations: int = 5000
    root_seed: int = 0
    baselines: bool = False
    consensus: bool = True
    convergence_window: int = 100
    trajectory_stride: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "r_values", tuple(self.r_values))
        object.__setattr__(self, "sigma_values", tuple(self.sigma_values))
        for name in ("operators", "n_values", "r_values", "sigma_values"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        for op in self.operators:
            if op not in OPERATOR_IDS:
                raise ConfigError(
                    f"unknown operator {op!r}; expected one of {sorted(OPERATOR_IDS)}"
                )
        for n in self.n_values:
            if n < 2:
                raise ConfigError(f"state counts must be >= 2, got {n}")
        for r in self.r_values:
            if not 0.0 <= r <= 1.0:
                raise ConfigError(f"evidence rates must lie in [0, 1], got {r}")
        for sigma in self.sigma_values:
            if sigma < 0.0:
                raise ConfigError(f"noise levels must be >= 0, got {sigma}")
        if self.runs_per_cell < 1:
            raise ConfigError("runs_per_cell must be >= 1")
        if self.k < 2 and True in self.consensus_modes():
            raise ConfigError("k must be >= 2 for consensus cells")
        if self.root_seed < 0:
            raise ConfigError("root_seed must be a non-negative 64-bit integer")

    def consensus_modes(self) -> tuple[bool, ...]:
        if not self.consensus:
            return (False,)
        if self.baselines:
            return (True, False)
        return (True,)


@dataclass(frozen=True)
class Cell:
    """One grid point; index fields feed seed derivation."""

    operator: str
    n: int
    r: float
    sigma: float
    consensus: bool
    r_index: int
    sigma_index: int

    def sort_key(self):
        return (self.operator, self.n, self.r, self.sigma, self.consensus)


@dataclass(frozen=True)
class RunRecord:
    """Per-run outcome reduced to the quantities the experiment files carry.

    ``convergence_iteration`` is the detection iteration (the static window is
    complete there); ``stasis_iteration`` subtracts the window, i.e. the
    iteration after which nothing changed.  Convergence-time statistics use
    the latter, so a population that locks instantly reports 0, not the
    window length.
    """

    operator: str
    n: int
    k: int
    r: float
    sigma: float
    consensus: bool
    run_index: int
    seed: int
    converged: bool
    convergence_iteration: int | None
    stasis_iteration: int | None
    dempster_skips: int
    mean_bel: tuple[float, ...]
    mean_pl_best: float
    mean_bel_top2: float


@dataclass(frozen=True)
class CellSummary:
    """Across-run statistics for one cell."""

    operator: str
    n: int
    k: int
    r: float
    sigma: float
    consensus: bool
    runs: int
    mean_bel_best: float
    std_bel_best: float
    converged_fraction: float
    mean_conv_iter: float | None
    std_conv_iter: float | None
    mean_bel_top2: float


@dataclass
class SweepResult:
    """Everything a sweep produced, in deterministic order."""

    spec: SweepSpec
    summaries: list[CellSummary]
    records: list[RunRecord]
    results: list[tuple[Cell, int, RunResult]] | None = None


def derive_seed(
    root_seed: int,
    operator: str,
    n: int,
    r_index: int,
    sigma_index: int,
    consensus: bool,
    run_index: int,
) -> int:
    """Per-run seed from the root seed and cell/run indices.

    The hash is numpy's SeedSequence entropy mix over the 7-tuple
    (root_seed, operator id, n, r index, sigma index, consensus flag,
    run index); operator ids are pinned in ``OPERATOR_IDS``.
    """
    entropy = [
        root_seed,
        OPERATOR_IDS[operator],
        n,
        r_index,
        sigma_index,
        int(consensus),
        run_index,
    ]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def build_cells(spec: SweepSpec) -> list[Cell]:
    """All grid points, sorted by (operator, n, r, sigma, consensus)."""
    cells = [
        Cell(op, n, r, sigma, consensus, r_index, sigma_index)
        for op in spec.operators
        for n in spec.n_values
        for r_index, r in enumerate(spec.r_values)
        for sigma_index, sigma in enumerate(spec.sigma_values)
        for consensus in spec.consensus_modes()
    ]
    cells.sort(key=Cell.sort_key)
    return cells


def cell_config(spec: SweepSpec, cell: Cell, run_index: int) -> SimConfig:
    seed = derive_seed(
        spec.root_seed,
        cell.operator,
        cell.n,
        cell.r_index,
        cell.sigma_index,
        cell.consensus,
        run_index,
    )
    return SimConfig(
        operator=cell.operator,
        k=spec.k,
        n=cell.n,
        r=cell.r,
        sigma=cell.sigma,
        max_iterations=spec.max_iterations,
        consensus_enabled=cell.consensus,
        seed=seed,
        trajectory_stride=spec.trajectory_stride,
        convergence_window=spec.convergence_window,
    )


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else the DSTCONS_WORKERS env var, else 1."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        workers = int(env) if env else 1
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def run_sweep(
    spec: SweepSpec, workers: int | None = None, keep_results: bool = False
) -> SweepResult:
    """Execute every (cell, run) pair and aggregate per-cell statistics.

    Worker processes only change wall-clock time: tasks are generated and
    reduced in a fixed order, and every run's seed is derived independently.
    """
    workers = resolve_workers(workers)
    cells = build_cells(spec)
    tasks = [
        (cell, run_index)
        for cell in cells
        for run_index in range(spec.runs_per_cell)
    ]
    configs = [cell_config(spec, cell, run_index) for cell, run_index in tasks]
    if workers == 1 or len(configs) < 2:
        results = [run(config) for config in configs]
    else:
        chunk = max(1, len(configs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, configs, chunksize=chunk))

    records = [
        _make_record(cell, run_index, result)
        for (cell, run_index), result in zip(tasks, results)
    ]
    summaries = []
    per_cell = spec.runs_per_cell
    for i, cell in enumerate(cells):
        summaries.append(
            summarize_cell(spec, cell, records[i * per_cell : (i + 1) * per_cell])
        )
    kept = (
        [(cell, run_index, res) for (cell, run_index), res in zip(tasks, results)]
        if keep_results
        else None
    )
    return SweepResult(spec=spec, summaries=summaries, records=records, results=kept)


def _make_record(cell: Cell, run_index: int, result: RunResult) -> RunRecord:
    agents = result.steady_state
    frame = agents[0].frame
    n = frame.n
    top2 = frame.singleton(n) | frame.singleton(n - 1)
    stasis = (
        result.convergence_iteration - result.config.convergence_window
        if result.converged
        else None
    )
    return RunRecord(
        operator=cell.operator,
        n=cell.n,
        k=result.config.k,
        r=cell.r,
        sigma=cell.sigma,
        consensus=cell.consensus,
        run_index=run_index,
        seed=result.config.seed,
        converged=result.converged,
        convergence_iteration=result.convergence_iteration,
        stasis_iteration=stasis,
        dempster_skips=result.dempster_skips,
        mean_bel=tuple(
            population_mean_bel(agents, frame.singleton(j)) for j in range(1, n + 1)
        ),
        mean_pl_best=population_mean_pl(agents, frame.singleton(n)),
        mean_bel_top2=population_mean_bel(agents, top2),
    )


def summarize_convergence_time(
    records: Sequence[RunRecord],
) -> tuple[float | None, float | None]:
    """Mean/std iterations-to-stasis over converged runs; None when none converged.

    Uses ``stasis_iteration`` (detection iteration minus the convergence
    window) so the statistic measures how long the dynamics actually ran.
    """
    iters = [r.stasis_iteration for r in records if r.converged]
    if not iters:
        return None, None
    arr = np.asarray(iters, dtype=float)
    return float(arr.mean()), float(arr.std())


def summarize_cell(
    spec: SweepSpec, cell: Cell, records: Sequence[RunRecord]
) -> CellSummary:
    best = np.array([rec.mean_bel[-1] for rec in records])
    top2 = np.array([rec.mean_bel_top2 for rec in records])
    mean_conv, std_conv = summarize_convergence_time(records)
    return CellSummary(
        operator=cell.operator,
        n=cell.n,
        k=spec.k,
        r=cell.r,
        sigma=cell.sigma,
        consensus=cell.consensus,
        runs=len(records),
        mean_bel_best=float(best.mean()),
        std_bel_best=float(best.std()),
        converged_fraction=sum(rec.converged for rec in records) / len(records),
        mean_conv_iter=mean_conv,
        std_conv_iter=std_conv,
        mean_bel_top2=float(top2.mean()),
    )


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------


def _fmt(value, full_precision: bool = False) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if full_precision:
        return repr(float(value))
    return format(float(value), ".6g")


def _json_value(value, full_precision: bool = False):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if full_precision:
        return float(value)
    return float(format(float(value), ".6g"))


def _sibling(path: Path, tag: str) -> Path:
    return path.with_name(path.stem + "_" + tag + path.suffix)


def _write_table(
    path: Path,
    columns: Sequence[str],
    rows: list[list],
    fmt: str,
    full_precision: bool = False,
) -> None:
    # Per-run files keep full float precision so aggregates can be recomputed
    # exactly; summary/trajectory files round to 6 significant digits.
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = [
            {col: _json_value(value, full_precision) for col, value in zip(columns, row)}
            for row in rows
        ]
        path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(value, full_precision) for value in row])


def summary_rows(summaries: Sequence[CellSummary]) -> list[list]:
    ordered = sorted(
        summaries, key=lambda s: (s.operator, s.n, s.r, s.sigma, s.consensus)
    )
    return [
        [
            s.operator,
            s.n,
            s.k,
            s.r,
            s.sigma,
            s.consensus,
            s.runs,
            s.mean_bel_best,
            s.std_bel_best,
            s.converged_fraction,
            s.mean_conv_iter,
            s.std_conv_iter,
        ]
        for s in ordered
    ]


def emit_csv(
    summaries: Sequence[CellSummary],
    path: str | Path,
    records: Sequence[RunRecord] | None = None,
    fmt: str = "csv",
) -> list[Path]:
    """Write the per-cell summary table, plus the per-run sibling when given.

    Floats carry 6 significant digits; rows are sorted by (operator, n, r,
    sigma).  With ``fmt="json"`` the same tables are written as JSON arrays.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}; expected csv or json")
    path = Path(path)
    written = [path]
    _write_table(path, SUMMARY_COLUMNS.split(","), summary_rows(summaries), fmt)
    if records is not None:
        runs_path = _sibling(path, "runs")
        _write_table(runs_path, *_runs_table(records), fmt=fmt, full_precision=True)
        written.append(runs_path)
    return written


def _runs_table(records: Sequence[RunRecord]) -> tuple[list[str], list[list]]:
    n_max = max(rec.n for rec in records) if records else 0
    columns = [
        "operator",
        "n",
        "k",
        "r",
        "sigma",
        "consensus",
        "run_index",
        "seed",
        "converged",
        "convergence_iteration",
        "stasis_iteration",
        "dempster_skips",
        "mean_pl_best",
        "mean_bel_top2",
    ] + [f"bel_s{j}" for j in range(1, n_max + 1)]
    ordered = sorted(
        records,
        key=lambda rec: (rec.operator, rec.n, rec.r, rec.sigma, rec.consensus, rec.run_index),
    )
    rows = []
    for rec in ordered:
        bels = list(rec.mean_bel) + [None] * (n_max - rec.n)
        rows.append(
            [
                rec.operator,
                rec.n,
                rec.k,
                rec.r,
                rec.sigma,
                rec.consensus,
                rec.run_index,
                rec.seed,
                rec.converged,
                rec.convergence_iteration,
                rec.stasis_iteration,
                rec.dempster_skips,
                rec.mean_pl_best,
                rec.mean_bel_top2,
            ]
            + bels
        )
    return columns, rows


def trajectory_rows(
    operator: str,
    iterations: np.ndarray,
    bel_by_state: np.ndarray,
    pl_best: np.ndarray,
) -> list[list]:
    return [
        [operator, int(t)] + [float(v) for v in bel_by_state[i]] + [float(pl_best[i])]
        for i, t in enumerate(iterations)
    ]


def emit_trajectory(
    rows: list[list], n: int, path: str | Path, fmt: str = "csv"
) -> Path:
    """Write trajectory samples: operator, iteration, mean Bel per state, Pl(best)."""
    path = Path(path)
    columns = (
        ["operator", "iteration"]
        + [f"bel_s{j}" for j in range(1, n + 1)]
        + ["pl_best"]
    )
    _write_table(path, columns, rows, fmt)
    return path


def mean_trajectory(
    results: Sequence[RunResult], stride: int, max_iterations: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Average sampled trajectories over runs on a common iteration grid.

    Converged runs hold their steady state, so samples past a run's final
    iteration reuse its last recorded value.
    """
    grid = np.arange(0, max_iterations + 1, stride)
    n = results[0].trajectory_bel.shape[1]
    bel_sum = np.zeros((grid.size, n))
    pl_sum = np.zeros(grid.size)
    for res in results:
        iters = res.trajectory_iterations
        idx = np.searchsorted(iters, grid)
        idx = np.minimum(idx, iters.size - 1)
        bel_sum += res.trajectory_bel[idx]
        pl_sum += res.trajectory_pl_best[idx]
    return grid, bel_sum / len(results), pl_sum / len(results)


# ---------------------------------------------------------------------------
# Sweep config files: flat key = value lines, lists comma-separated
# ---------------------------------------------------------------------------

_LIST_STR = "list_str"
_LIST_INT = "list_int"
_LIST_FLOAT = "list_float"

CONFIG_KEYS = {
    "operators": _LIST_STR,
    "n_values": _LIST_INT,
    "k": int,
    "r_values": _LIST_FLOAT,
    "sigma_values": _LIST_FLOAT,
    "runs_per_cell": int,
    "max_iterations": int,
    "root_seed": int,
    "baselines": bool,
    "consensus": bool,
    "convergence_window": int,
}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_sweep_config(text: str) -> dict:
    """Parse the flat ``key = value`` sweep config format into a kwargs dict."""
    values: dict = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {line_no}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate config key {key!r}")
        kind = CONFIG_KEYS[key]
        try:
            if kind is _LIST_STR:
                values[key] = tuple(item.strip() for item in value.split(",") if item.strip())
            elif kind is _LIST_INT:
                values[key] = tuple(int(item) for item in value.split(",") if item.strip())
            elif kind is _LIST_FLOAT:
                values[key] = tuple(float(item) for item in value.split(",") if item.strip())
            elif kind is bool:
                values[key] = _parse_bool(value)
            else:
                values[key] = kind(value)
        except ValueError as exc:
            raise ConfigError(f"line {line_no}: bad value for {key!r}: {exc}") from None
    return values


def sweep_spec_from_config(text: str, overrides: dict | None = None) -> SweepSpec:
    """Build a SweepSpec from config text plus optional override kwargs."""
    values = parse_sweep_config(text)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    if "operators" not in values:
        raise ConfigError("config must name at least one operator (key 'operators')")
    try:
        return SweepSpec(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# Canned experiment grids
# ---------------------------------------------------------------------------

ALL_OPERATORS = ("average", "dempster", "dubois_prade", "yager")
FINE_R_GRID = (0.0005, 0.001, 0.002, 0.004, 0.006, 0.008, 0.01)
COARSE_R_GRID = (0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0)
SIGMA_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)

FIGURE_PRESETS = {
    "fig1": "belief trajectories for all operators (n=3, r=0.05, sigma=0.1)",
    "fig2": "steady-state belief vs evidence rate, with evidence-only baselines",
    "fig3": "cross-run standard deviation vs evidence rate (r <= 0.5)",
    "fig4": "steady-state belief vs noise level for r in {0.01, 0.05, 0.1}",
    "fig5": "scalability: belief in the best state for n in {3, 5, 10}",
}


def preset_spec(
    figure: str, runs: int = 100, root_seed: int = 0, max_iterations: int = 5000
) -> SweepSpec:
    """The sweep grid behind each canned experiment."""
    common = dict(
        k=100, runs_per_cell=runs, max_iterations=max_iterations, root_seed=root_seed
    )
    if figure == "fig1":
        return SweepSpec(
            operators=ALL_OPERATORS,
            n_values=(3,),
            r_values=(0.05,),
            sigma_values=(0.1,),
            trajectory_stride=10,
            **common,
        )
    if figure == "fig2":
        return SweepSpec(
            operators=ALL_OPERATORS,
            n_values=(3,),
            r_values=FINE_R_GRID + COARSE_R_GRID,
            sigma_values=(0.1,),
            baselines=True,
            **common,
        )
    if figure == "fig3":
        return SweepSpec(
            operators=ALL_OPERATORS,
            n_values=(3,),
            r_values=tuple(r for r in FINE_R_GRID + COARSE_R_GRID if r <= 0.5),
            sigma_values=(0.1,),
            baselines=True,
            **common,
        )
    if figure == "fig4":
        return SweepSpec(
            operators=ALL_OPERATORS,
            n_values=(3,),
            r_values=(0.01, 0.05, 0.1),
            sigma_values=SIGMA_GRID,
            **common,
        )
    if figure == "fig5":
        return SweepSpec(
            operators=("dubois_prade", "yager"),
            n_values=(3, 5, 10),
            r_values=(0.05,),
            sigma_values=SIGMA_GRID,
            **common,
        )
    raise ConfigError(
        f"unknown figure {figure!r}; expected one of {sorted(FIGURE_PRESETS)}"
    )


def reproduce(
    figure: str,
    out_dir: str | Path,
    runs: int = 100,
    root_seed: int = 0,
    max_iterations: int = 5000,
    workers: int | None = None,
    fmt: str = "csv",
) -> list[Path]:
    """Run one canned experiment and write its summary/runs (and trajectory) files."""
    spec = preset_spec(figure, runs=runs, root_seed=root_seed, max_iterations=max_iterations)
    out_dir = Path(out_dir)
    suffix = ".json" if fmt == "json" else ".csv"
    keep = figure == "fig1"
    sweep = run_sweep(spec, workers=workers, keep_results=keep)
    written = emit_csv(
        sweep.summaries, out_dir / f"{figure}{suffix}", sweep.records, fmt=fmt
    )
    if keep:
        rows: list[list] = []
        by_cell: dict[str, list[RunResult]] = {}
        for cell, _, result in sweep.results:
            by_cell.setdefault(cell.operator, []).append(result)
        for operator in sorted(by_cell):
            grid, bel_means, pl_means = mean_trajectory(
                by_cell[operator], spec.trajectory_stride, spec.max_iterations
            )
            rows.extend(trajectory_rows(operator, grid, bel_means, pl_means))
        written.append(
            emit_trajectory(rows, spec.n_values[0], out_dir / f"{figure}_trajectory{suffix}", fmt)
        )
    return written
