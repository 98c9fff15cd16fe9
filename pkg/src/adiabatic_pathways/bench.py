"""Scenario runners: single runs, (T, alpha) grids, minimum-time scans,
qubit scaling and wall-time comparison of the optimizers.

Every runner is a pure function of its config. Seeds for scan cells are
derived from the base seed and the cell index, so cells can run in any
order or concurrently.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import de, dmorph, dynamics, kernels
from .hamiltonians import AdiabaticProblem, problem_from_name
from .qcore import ValidationError
from .schedules import linear, roland_cerf, write_schedule_csv

METHODS = ("linear", "rc", "de", "dmorph")
PROBLEMS = ("landau-zener", "grover")


class ConfigError(ValidationError):
    pass


class ScenarioFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    problem: str = "landau-zener"
    n: int = 1
    m: int = 0
    reduced: bool = False
    method: str = "de"
    T: float = 3.0
    alpha: float = 0.1
    M: int = 100
    R: int = 5
    seed: int = 0
    de: dict = field(default_factory=dict)
    dmorph: dict = field(default_factory=dict)
    output: str | None = None

    def validate(self) -> "ScenarioConfig":
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.problem == "grover" and not (1 <= self.n <= 10 and 0 <= self.m < 2**self.n):
            raise ConfigError(f"grover needs 1 <= n <= 10 and 0 <= m < 2**n, got n={self.n}, m={self.m}")
        if self.reduced and self.problem != "grover":
            raise ConfigError("--reduced only applies to the grover problem")
        if self.method == "rc" and self.problem != "grover":
            raise ConfigError("the rc schedule is defined for the grover problem only")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"T must be positive, got {self.T}")
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.M < 2 or self.R < 1:
            raise ConfigError(f"need M >= 2 and R >= 1, got M={self.M}, R={self.R}")
        try:
            self.de_config().validate()
            self.dmorph_config().validate()
        except (TypeError, ValidationError) as exc:
            raise ConfigError(f"invalid optimizer settings: {exc}") from exc
        return self

    def de_config(self, seed: int | None = None) -> de.DeConfig:
        opts = dict(self.de)
        for key in ("a_range", "b_range", "omega_jitter"):
            if key in opts:
                opts[key] = tuple(opts[key])
        cfg = de.DeConfig(**opts)
        return replace(cfg, seed=self.seed if seed is None else seed)

    def dmorph_config(self) -> dmorph.DmorphConfig:
        return replace(dmorph.DmorphConfig(**self.dmorph), M=self.M)

    def build_problem(self) -> AdiabaticProblem:
        return problem_from_name(self.problem, self.n, self.m, self.reduced)

    def resolved(self) -> dict:
        out = asdict(self)
        out["de"] = self.de_config().to_dict()
        out["dmorph"] = self.dmorph_config().to_dict()
        out["dmorph"]["step_size_memory"] = "retained after accepted steps"
        out["kernel_backend"] = kernels.BACKEND
        return out


def load_config(path, **overrides) -> ScenarioConfig:
    """Read a JSON config file; keys are ScenarioConfig field names."""
    with open(path) as fh:
        data = json.load(fh)
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(data) - known - {"scan"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data.pop("scan", None)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**data)


def derive_seed(base: int, cell: int, repeat: int = 0) -> int:
    """Seed of repeat ``repeat`` in scan cell ``cell``: keyed on base XOR cell."""
    return int(np.random.SeedSequence([base ^ cell, repeat]).generate_state(1)[0])


def is_deterministic(method: str) -> bool:
    return method in ("linear", "rc", "dmorph")


@dataclass
class RunRecord:
    seed: int
    report: dynamics.ObjectiveReport
    schedule: object
    history: list | None
    history_columns: tuple | None
    iterations: int
    wall_time: float


@dataclass
class RunResult:
    config: ScenarioConfig
    runs: list

    def _mean(self, key) -> float:
        return float(np.mean([getattr(r.report, key) for r in self.runs]))

    @property
    def F(self) -> float:
        return self._mean("F")

    @property
    def F1(self) -> float:
        return self._mean("F1")

    @property
    def F2(self) -> float:
        return self._mean("F2")

    @property
    def best(self) -> RunRecord:
        return max(self.runs, key=lambda r: r.report.F)

    def aggregate(self) -> dict:
        return {"F": self.F, "F1": self.F1, "F2": self.F2, "runs": len(self.runs), "aggregation": "mean"}


def _run_once(cfg: ScenarioConfig, problem: AdiabaticProblem, seed: int) -> RunRecord:
    t0 = time.perf_counter()
    if cfg.method in ("linear", "rc"):
        sch = linear(cfg.M) if cfg.method == "linear" else roland_cerf(problem.search_dim, cfg.M)
        report = dynamics.objective(problem, sch, cfg.T, cfg.alpha)
        return RunRecord(seed, report, sch, None, None, 0, time.perf_counter() - t0)
    if cfg.method == "de":
        res = de.de_optimize(problem, cfg.T, cfg.alpha, config=cfg.de_config(seed), M=cfg.M)
        return RunRecord(seed, res.report, res.schedule, res.history, de.HISTORY_COLUMNS,
                         res.state.generation, time.perf_counter() - t0)
    res = dmorph.dmorph_optimize(problem, cfg.T, cfg.alpha, config=cfg.dmorph_config())
    return RunRecord(seed, res.report, res.schedule, res.history, dmorph.HISTORY_COLUMNS,
                     res.iterations, time.perf_counter() - t0)


def run_single(cfg: ScenarioConfig, cell: int = 0) -> RunResult:
    """Run one (problem, method, T, alpha) scenario, R times for stochastic methods."""
    cfg.validate()
    problem = cfg.build_problem()
    repeats = 1 if is_deterministic(cfg.method) else cfg.R
    runs = [_run_once(cfg, problem, derive_seed(cfg.seed, cell, r)) for r in range(repeats)]
    result = RunResult(cfg, runs)
    if cfg.output:
        write_run(result, Path(cfg.output))
    return result


RUNS_COLUMNS = ("repeat", "seed", "F", "F1", "F2", "iterations")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_run(result: RunResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    (out / "config.json").write_text(json.dumps(cfg.resolved(), indent=2, sort_keys=True))
    rows = []
    for r, rec in enumerate(result.runs):
        write_schedule_csv(rec.schedule, out / f"run{r}_schedule.csv")
        dynamics.write_trace_csv(rec.report, rec.schedule, out / f"run{r}_trace.csv")
        if rec.history is not None:
            _write_rows(out / f"run{r}_history.csv", rec.history_columns, rec.history)
        rows.append((r, rec.seed, rec.report.F, rec.report.F1, rec.report.F2, rec.iterations))
    agg = result.aggregate()
    rows.append(("mean", "", agg["F"], agg["F1"], agg["F2"], ""))
    _write_rows(out / "runs.csv", RUNS_COLUMNS, rows)
    meta = {
        "config": cfg.resolved(),
        "seeds": [rec.seed for rec in result.runs],
        "wall_time_s": [rec.wall_time for rec in result.runs],
        "aggregate": agg,
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))


# -- grid scan ---------------------------------------------------------------

GRID_COLUMNS = ("T", "alpha", "F_mean", "F1_mean", "F2_mean", "wall_time")


@dataclass
class ScanResult:
    axes: dict
    columns: tuple
    rows: list
    aggregation: str = "mean"
    metadata: dict = field(default_factory=dict)

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    def to_csv(self, path) -> None:
        _write_rows(Path(path), self.columns, self.rows)


def _grid_cell(args):
    cfg, cell = args
    t0 = time.perf_counter()
    res = run_single(cfg, cell=cell)
    return (cfg.T, cfg.alpha, res.F, res.F1, res.F2, time.perf_counter() - t0)


def grid_scan(T_values, alpha_values, method: str, R: int = 5, base: ScenarioConfig | None = None,
              workers: int = 1) -> ScanResult:
    base = replace(base or ScenarioConfig(), method=method, R=R)
    cells = []
    for i, T in enumerate(T_values):
        for j, alpha in enumerate(alpha_values):
            c = i * len(alpha_values) + j
            out = str(Path(base.output) / f"cell{c:03d}") if base.output else None
            cfg = replace(base, T=float(T), alpha=float(alpha), output=out).validate()
            cells.append((cfg, c))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_grid_cell, cells))
    else:
        rows = [_grid_cell(c) for c in cells]
    scan = ScanResult({"T": list(map(float, T_values)), "alpha": list(map(float, alpha_values))},
                      GRID_COLUMNS, rows, metadata={"config": base.resolved()})
    if base.output:
        _finish_scan(scan, Path(base.output), "grid.csv")
    return scan


def _finish_scan(scan: ScanResult, out: Path, name: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    scan.to_csv(out / name)
    meta = dict(scan.metadata, axes=scan.axes, aggregation=scan.aggregation)
    (out / "config.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str))


# -- minimum adiabatic time ---------------------------------------------------

STEP_COLUMNS = ("step", "T", "F", "F1", "F2")


@dataclass
class MinTimeResult:
    T: float
    F: float
    F1: float
    F2: float
    steps: list
    dT: float
    T0: float


def default_dT(problem: str, N: int) -> float:
    return 0.25 if problem == "landau-zener" else 0.25 * math.sqrt(N)


def min_time_scan(base: ScenarioConfig, T0: float | None = None, dT: float | None = None,
                  tol: float = 1e-3, max_steps: int = 200) -> MinTimeResult:
    """Increase T by dT until successive F differ by less than ``tol``."""
    base.validate()
    N = base.build_problem().search_dim
    dT = default_dT(base.problem, N) if dT is None else dT
    T0 = dT if T0 is None else T0
    if not (dT > 0 and T0 > 0):
        raise ConfigError(f"scan needs T0 > 0 and dT > 0, got T0={T0}, dT={dT}")
    steps = []
    prev = None
    for k in range(max_steps + 1):
        T = T0 + k * dT
        res = run_single(replace(base, T=T, output=None))
        steps.append((k, T, res.F, res.F1, res.F2))
        if prev is not None and abs(prev - res.F) < tol:
            out = MinTimeResult(T, res.F, res.F1, res.F2, steps, dT, T0)
            if base.output:
                _write_rows(Path(base.output) / "min_time_steps.csv", STEP_COLUMNS, steps)
            return out
        prev = res.F
    raise ScenarioFailure(f"min-time scan hit the cap of {max_steps} steps without |dF| < {tol}")


SCALING_COLUMNS = ("n", "N", "T_min", "F", "F1", "F2", "steps", "dT")


def qubit_scaling(method: str, n_values, alpha: float = 0.1, base: ScenarioConfig | None = None,
                  dT_scale: float = 0.25, tol: float = 1e-3, max_steps: int = 200,
                  R: int = 1) -> ScanResult:
    base = replace(base or ScenarioConfig(problem="grover"), problem="grover", method=method,
                   alpha=alpha, m=0, R=R)
    rows = []
    for n in n_values:
        N = 2**n
        dT = dT_scale * math.sqrt(N)
        cfg = replace(base, n=int(n), output=None)
        res = min_time_scan(cfg, T0=dT, dT=dT, tol=tol, max_steps=max_steps)
        rows.append((int(n), N, res.T, res.F, res.F1, res.F2, len(res.steps), dT))
    scan = ScanResult({"n": [int(n) for n in n_values]}, SCALING_COLUMNS, rows,
                      metadata={"config": base.resolved(), "dT_scale": dT_scale, "tol": tol})
    if base.output:
        _finish_scan(scan, Path(base.output), f"scaling_{method}.csv")
    return scan


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# -- timing -------------------------------------------------------------------

TIMING_COLUMNS = ("n", "method", "time_per_iteration", "total_time", "iterations")


def timing_report(methods=("de", "dmorph"), n_values=(1, 2, 3), R: int = 3,
                  base: ScenarioConfig | None = None, T_of_N=None) -> ScanResult:
    """Median wall time of complete optimizer runs on the Grover problem.

    One warm-up run per (method, n) is discarded.
    """
    base = replace(base or ScenarioConfig(problem="grover"), problem="grover", R=1)
    T_of_N = T_of_N or (lambda N: 2.0 * math.sqrt(N))
    rows = []
    for method in methods:
        for n in n_values:
            cfg = replace(base, method=method, n=int(n), T=T_of_N(2**n), output=None).validate()
            problem = cfg.build_problem()
            _run_once(cfg, problem, cfg.seed)
            recs = [_run_once(cfg, problem, derive_seed(cfg.seed, 0, r)) for r in range(R)]
            totals = [rec.wall_time for rec in recs]
            per_it = [rec.wall_time / max(rec.iterations, 1) for rec in recs]
            iters = int(np.median([rec.iterations for rec in recs]))
            rows.append((int(n), method, float(np.median(per_it)), float(np.median(totals)), iters))
    scan = ScanResult({"method": list(methods), "n": [int(n) for n in n_values]}, TIMING_COLUMNS, rows,
                      aggregation="median", metadata={"config": base.resolved(), "R": R})
    if base.output:
        _finish_scan(scan, Path(base.output), "timing.csv")
    return scan
