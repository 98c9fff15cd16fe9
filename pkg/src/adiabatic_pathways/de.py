"""Differential evolution (DE/best/2, binomial crossover) over CRAB parameters.

The population is updated generation-wise: every trial of generation G is
built from generation G-1, all trials are scored (optionally concurrently),
then selection is applied in ascending member order. Random numbers for each
member are drawn up front, in member order, so thread scheduling cannot
change any decision.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dynamics
from .hamiltonians import AdiabaticProblem
from .qcore import ValidationError
from .schedules import (
    DEFAULT_ENVELOPE,
    CrabParams,
    GuessEnvelope,
    crab_schedule,
)

INFEASIBLE = -math.inf


class NoFeasibleCandidate(RuntimeError):
    pass


@dataclass(frozen=True)
class DeConfig:
    S: float = 0.6
    C: float = 0.95
    P: int = 20
    N_c: int = 2
    G_max: int = 300
    seed: int = 0
    a_range: tuple[float, float] = (-0.5, 0.5)
    b_range: tuple[float, float] = (-0.5, 0.5)
    # omega_l^k = 2 pi k (1 + jitter), jitter ~ U(omega_jitter)
    omega_jitter: tuple[float, float] = (-0.5, 0.5)
    workers: int = 1
    record_mutations: bool = False

    @property
    def D(self) -> int:
        return 6 * self.N_c

    def validate(self) -> "DeConfig":
        if self.P < 5:
            raise ValidationError(f"DE/best/2 needs P >= 5, got P={self.P}")
        if not 0.0 <= self.C <= 1.0:
            raise ValidationError(f"crossover rate C must lie in [0, 1], got {self.C}")
        if self.N_c < 1:
            raise ValidationError(f"N_c must be >= 1, got {self.N_c}")
        if self.G_max < 0:
            raise ValidationError(f"G_max must be >= 0, got {self.G_max}")
        for name in ("a_range", "b_range", "omega_jitter"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValidationError(f"{name} must satisfy lo <= hi, got {(lo, hi)}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class DeState:
    population: np.ndarray  # (P, D)
    scores: np.ndarray  # (P,) objective F, -inf if infeasible
    f1: np.ndarray
    f2: np.ndarray
    generation: int = 0
    history: list = field(default_factory=list)
    mutation_log: list = field(default_factory=list)

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.scores))

    def record(self) -> None:
        b = self.best_index
        finite = self.scores[np.isfinite(self.scores)]
        mean = float(finite.mean()) if finite.size else INFEASIBLE
        self.history.append(
            (self.generation, float(self.scores[b]), float(self.f1[b]), float(self.f2[b]), mean)
        )


class CrabObjective:
    """Scores a CRAB vector: (F, F1, F2), or (-inf, nan, nan) if infeasible."""

    def __init__(self, problem: AdiabaticProblem, T: float, alpha: float,
                 envelope: GuessEnvelope = DEFAULT_ENVELOPE, M: int = 100, n_harmonics: int = 2):
        self.problem = problem
        self.T = T
        self.alpha = alpha
        self.envelope = envelope
        self.M = M
        self.n_harmonics = n_harmonics
        self.calls = 0

    def schedule(self, x):
        return crab_schedule(CrabParams(x, self.n_harmonics), self.envelope, self.M)

    def __call__(self, x) -> tuple[float, float, float]:
        self.calls += 1
        try:
            sch = self.schedule(x)
        except ValidationError:  # constant or non-finite raw control
            return INFEASIBLE, math.nan, math.nan
        return dynamics.score(self.problem, sch, self.T, self.alpha)


def sample_member(config: DeConfig, rng: np.random.Generator) -> np.ndarray:
    nc = config.N_c
    k = np.arange(1, nc + 1)
    table = np.empty((2, 3, nc))
    table[:, 0] = rng.uniform(*config.a_range, size=(2, nc))
    table[:, 1] = rng.uniform(*config.b_range, size=(2, nc))
    table[:, 2] = 2 * np.pi * k * (1 + rng.uniform(*config.omega_jitter, size=(2, nc)))
    return table.ravel()


def guess_member(n_harmonics: int) -> np.ndarray:
    """All a = b = 0 with nominal frequencies 2 pi k: renders to the guess envelope."""
    table = np.zeros((2, 3, n_harmonics))
    table[:, 2] = 2 * np.pi * np.arange(1, n_harmonics + 1)
    return table.ravel()


def de_init(config: DeConfig, rng: np.random.Generator, evaluator=None) -> DeState:
    config.validate()
    pop = np.array([sample_member(config, rng) for _ in range(config.P)])
    pop[0] = guess_member(config.N_c)
    P = config.P
    state = DeState(pop, np.full(P, INFEASIBLE), np.full(P, math.nan), np.full(P, math.nan))
    if evaluator is not None:
        for i, (f, f1, f2) in enumerate(map(evaluator, pop)):
            state.scores[i], state.f1[i], state.f2[i] = f, f1, f2
        state.record()
    return state


def donor_indices(i: int, P: int, rng: np.random.Generator) -> np.ndarray:
    """Four mutually distinct population indices, all different from i."""
    r = rng.choice(P - 1, size=4, replace=False)
    return r + (r >= i)


def de_mutate(state: DeState, i: int, config: DeConfig, rng: np.random.Generator | None = None,
              indices=None) -> np.ndarray:
    """Donor V = X_best + S (X_r1 - X_r2) + S (X_r3 - X_r4)."""
    if indices is None:
        indices = donor_indices(i, len(state.population), rng)
    r1, r2, r3, r4 = indices
    x = state.population
    if config.record_mutations:
        state.mutation_log.append((i, int(r1), int(r2), int(r3), int(r4)))
    best = x[state.best_index]
    return best + config.S * (x[r1] - x[r2]) + config.S * (x[r3] - x[r4])


def de_crossover(target, donor, config: DeConfig, rng: np.random.Generator | None = None,
                 draws=None) -> np.ndarray:
    """Binomial crossover; gene j_rand always comes from the donor."""
    target = np.asarray(target)
    donor = np.asarray(donor)
    if draws is None:
        draws = (rng.random(target.size), int(rng.integers(target.size)))
    u, j_rand = draws
    take = u < config.C
    take[j_rand] = True
    return np.where(take, donor, target)


def de_select(state: DeState, i: int, trial, evaluator=None, result=None) -> bool:
    """Replace member i by the trial if its F is at least as good; ties go to the trial."""
    if result is None:
        result = evaluator(trial)
    f, f1, f2 = result
    if f >= state.scores[i]:
        state.population[i] = trial
        state.scores[i], state.f1[i], state.f2[i] = f, f1, f2
        return True
    return False


def de_generation(state: DeState, config: DeConfig, rng: np.random.Generator, evaluator,
                  executor=None) -> DeState:
    P, D = state.population.shape
    trials = np.empty_like(state.population)
    for i in range(P):
        idx = donor_indices(i, P, rng)
        draws = (rng.random(D), int(rng.integers(D)))
        donor = de_mutate(state, i, config, indices=idx)
        trials[i] = de_crossover(state.population[i], donor, config, draws=draws)
    if executor is None:
        results = list(map(evaluator, trials))
    else:
        results = list(executor.map(evaluator, trials))
    for i in range(P):
        de_select(state, i, trials[i], result=results[i])
    state.generation += 1
    state.record()
    return state


@dataclass
class DeResult:
    best: CrabParams
    report: dynamics.ObjectiveReport
    schedule: object
    history: list
    state: DeState
    config: DeConfig
    evaluations: int


def de_optimize(problem: AdiabaticProblem, T: float, alpha: float,
                envelope: GuessEnvelope = DEFAULT_ENVELOPE, config: DeConfig = DeConfig(),
                M: int = 100, callback=None) -> DeResult:
    config.validate()
    rng = np.random.default_rng(config.seed)
    evaluator = CrabObjective(problem, T, alpha, envelope, M, config.N_c)
    state = de_init(config, rng, evaluator)
    executor = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for _ in range(config.G_max):
            de_generation(state, config, rng, evaluator, executor)
            if callback is not None:
                callback(state)
    finally:
        if executor is not None:
            executor.shutdown()
    b = state.best_index
    if not np.isfinite(state.scores[b]):
        raise NoFeasibleCandidate("no feasible CRAB candidate was found; check the init ranges")
    best = CrabParams(state.population[b], config.N_c)
    sch = evaluator.schedule(best.vector)
    report = dynamics.objective(problem, sch, T, alpha)
    return DeResult(best, report, sch, state.history, state, config, evaluator.calls)


HISTORY_COLUMNS = ("generation", "best_F", "best_F1", "best_F2", "mean_F")


def write_history_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_COLUMNS)
        for g, *vals in history:
            w.writerow([g] + [repr(float(v)) for v in vals])
