"""Steady-state genetic algorithm over constant-weight removal masks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np

from .fitness import GLOBAL, FitnessEvaluator
from .masks import RemovalMask
from .oa import OrthogonalArray, removal_weight
from .operators import CROSSOVERS, random_balanced_mask, swap_mutation

__all__ = ["GaConfig", "RunReport", "Population", "steady_state_step", "run_ga"]

log = logging.getLogger(__name__)

FitnessFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 500
    tournament_size: int = 3
    mutation_probability: float = 0.2
    evaluation_budget: int = 100_000
    crossover_variant: str = "map_of_ones"
    seed: int = 0
    minkowski_exponent: float = 2.0
    aggregation: str = GLOBAL
    replace_only_if_better: bool = False
    early_stop: bool = True
    record_trace: bool = True

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if not 3 <= self.tournament_size <= self.population_size:
            raise ValueError(
                f"tournament_size must be in [3, population_size], got {self.tournament_size}"
            )
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation_probability must lie in [0, 1]")
        if self.evaluation_budget < self.population_size:
            raise ValueError("evaluation_budget must cover at least the initial population")
        if self.crossover_variant not in CROSSOVERS:
            raise ValueError(f"unknown crossover {self.crossover_variant!r}, expected one of {sorted(CROSSOVERS)}")
        if self.minkowski_exponent < 1:
            raise ValueError("minkowski_exponent must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GaConfig":
        return cls(**data)


@dataclass
class RunReport:
    best_fitness: float
    best_mask: RemovalMask
    success: bool
    evaluations_used: int
    seed: int
    fitness_trace: Optional[list[tuple[int, float]]] = None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "best_fitness": self.best_fitness,
            "success": self.success,
            "evaluations_used": self.evaluations_used,
            "best_mask": str(self.best_mask),
            "fitness_trace": None if self.fitness_trace is None else [list(x) for x in self.fitness_trace],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        trace = data.get("fitness_trace")
        return cls(
            best_fitness=float(data["best_fitness"]),
            best_mask=RemovalMask.from_string(data["best_mask"]),
            success=bool(data["success"]),
            evaluations_used=int(data["evaluations_used"]),
            seed=int(data["seed"]),
            fitness_trace=None if trace is None else [(int(i), float(f)) for i, f in trace],
        )


@dataclass
class Population:
    """Masks as rows of a (P, N) ``uint8`` matrix plus their fitness values."""

    masks: np.ndarray
    fitness: np.ndarray
    evaluations: int = 0
    best_fitness_ever: float = float("inf")
    best_mask_ever: Optional[np.ndarray] = None
    trace: list[tuple[int, float]] = field(default_factory=list)

    @classmethod
    def random(cls, size: int, length: int, weight: int, fitness_fn: FitnessFn, rng: np.random.Generator) -> "Population":
        masks = np.empty((size, length), dtype=np.uint8)
        fitness = np.empty(size, dtype=np.float64)
        pop = cls(masks, fitness)
        for i in range(size):
            masks[i] = random_balanced_mask(length, weight, rng)
            fitness[i] = fitness_fn(masks[i])
            pop._record(i, fitness[i])
        return pop

    def _record(self, index: int, value: float) -> None:
        self.evaluations += 1
        if value < self.best_fitness_ever:
            self.best_fitness_ever = value
            self.best_mask_ever = self.masks[index].copy()
            self.trace.append((self.evaluations, float(value)))

    def __len__(self):
        return len(self.fitness)


def _rank_tournament(fit: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Order tournament members from best to worst, breaking ties uniformly."""
    return np.lexsort((rng.random(fit.size), fit))


def steady_state_step(population: Population, fitness_fn: FitnessFn, config: GaConfig, rng: np.random.Generator) -> tuple[int, float]:
    """One tournament: the best two mate, the child replaces the worst.

    Updates ``population`` in place and returns the index written to and the
    child's fitness. With ``replace_only_if_better`` the child is discarded
    unless it is strictly fitter than the member it would replace (the
    evaluation is still spent).
    """
    entrants = rng.choice(len(population), size=config.tournament_size, replace=False)
    order = entrants[_rank_tournament(population.fitness[entrants], rng)]
    first, second, worst = order[0], order[1], order[-1]
    crossover = CROSSOVERS[config.crossover_variant]
    child = crossover(population.masks[first], population.masks[second], rng)
    if rng.random() < config.mutation_probability:
        child = swap_mutation(child, rng)
    value = float(fitness_fn(child))
    if config.replace_only_if_better and not value < population.fitness[worst]:
        population.evaluations += 1
        return -1, value
    population.masks[worst] = child
    population.fitness[worst] = value
    population._record(worst, value)
    return int(worst), value


def run_ga(
    arr: OrthogonalArray,
    target_index: int,
    config: GaConfig = GaConfig(),
    fitness_fn: FitnessFn | None = None,
) -> RunReport:
    """Search for a removal mask turning ``arr`` into an OA of index ``target_index``."""
    if arr.params.alphabet != 2:
        raise ValueError("the GA only supports binary arrays (s = 2)")
    weight = removal_weight(arr.params, target_index)
    if fitness_fn is None:
        fitness_fn = FitnessEvaluator(arr, target_index, config.minkowski_exponent, config.aggregation)
    rng = np.random.default_rng(config.seed)
    pop = Population.random(config.population_size, arr.params.n_rows, weight, fitness_fn, rng)
    while pop.evaluations < config.evaluation_budget:
        if config.early_stop and pop.best_fitness_ever == 0.0:
            break
        steady_state_step(pop, fitness_fn, config, rng)
    log.debug("seed %d: best %.6g after %d evaluations", config.seed, pop.best_fitness_ever, pop.evaluations)
    return RunReport(
        best_fitness=float(pop.best_fitness_ever),
        best_mask=RemovalMask(pop.best_mask_ever),
        success=bool(pop.best_fitness_ever == 0.0),
        evaluations_used=pop.evaluations,
        seed=config.seed,
        fitness_trace=list(pop.trace) if config.record_trace else None,
    )
