"""Exhaustive enumeration of all weight-p removal masks on small instances."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .fitness import GLOBAL, FitnessEvaluator, minkowski_fitness
from .ga import RunReport
from .masks import RemovalMask
from .oa import OaParams, OrthogonalArray, is_orthogonal_array, removal_weight, remove_rows

__all__ = [
    "DEFAULT_CAP",
    "MAX_LISTED_OPTIMA",
    "OracleRefused",
    "OracleReport",
    "colex_unrank",
    "iter_colex_masks",
    "exhaustive_search",
    "verify_ga_result",
]

DEFAULT_CAP = 10**8
MAX_LISTED_OPTIMA = 10_000
HISTOGRAM_DECIMALS = 6
_CHUNK = 4096


class OracleRefused(ValueError):
    """The instance has too many masks to enumerate."""


@dataclass
class OracleReport:
    instance_params: OaParams
    target_index: int
    masks_enumerated: int
    min_fitness: float
    optimal_count: int
    optimal_masks: list[RemovalMask]
    fitness_histogram: dict[float, int] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return self.optimal_count > len(self.optimal_masks)

    def to_dict(self) -> dict:
        p = self.instance_params
        return {
            "instance": {"n_rows": p.n_rows, "n_cols": p.n_cols, "alphabet": p.alphabet, "strength": p.strength},
            "target_index": self.target_index,
            "masks_enumerated": self.masks_enumerated,
            "min_fitness": self.min_fitness,
            "optimal_count": self.optimal_count,
            "optimal_masks": [str(m) for m in self.optimal_masks],
            "fitness_histogram": {f"{k:.{HISTOGRAM_DECIMALS}f}": v for k, v in sorted(self.fitness_histogram.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OracleReport":
        return cls(
            instance_params=OaParams(**data["instance"]),
            target_index=int(data["target_index"]),
            masks_enumerated=int(data["masks_enumerated"]),
            min_fitness=float(data["min_fitness"]),
            optimal_count=int(data["optimal_count"]),
            optimal_masks=[RemovalMask.from_string(s) for s in data["optimal_masks"]],
            fitness_histogram={float(k): int(v) for k, v in data["fitness_histogram"].items()},
        )


def colex_unrank(rank: int, n: int, k: int) -> int:
    """The ``rank``-th k-subset of range(n) in colex order, as a bit set."""
    value = 0
    for i in range(k, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= rank:
            c += 1
        rank -= math.comb(c, i)
        value |= 1 << c
    return value


def _next_colex(x: int) -> int:
    # Gosper's hack: next larger integer with the same popcount
    low = x & -x
    ripple = x + low
    return ripple | (((x ^ ripple) >> 2) // low)


def iter_colex_masks(n: int, k: int, start: int = 0, stop: int | None = None) -> Iterator[int]:
    """Yield the k-subsets of range(n) with colex rank in [start, stop) as ints."""
    total = math.comb(n, k)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    x = colex_unrank(start, n, k)
    for _ in range(stop - start):
        yield x
        x = _next_colex(x)


def _ints_to_bits(values: list[int], n: int) -> np.ndarray:
    ints = np.array(values, dtype=np.uint64)
    return ((ints[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)


@dataclass
class _Partial:
    min_fitness: float = math.inf
    optimal: list[int] = field(default_factory=list)
    optimal_count: int = 0
    histogram: dict[float, int] = field(default_factory=dict)

    def merge(self, other: "_Partial") -> None:
        if other.min_fitness < self.min_fitness:
            self.min_fitness = other.min_fitness
            self.optimal, self.optimal_count = list(other.optimal), other.optimal_count
        elif other.min_fitness == self.min_fitness:
            self.optimal.extend(other.optimal)
            self.optimal_count += other.optimal_count
        del self.optimal[MAX_LISTED_OPTIMA:]
        for key, count in other.histogram.items():
            self.histogram[key] = self.histogram.get(key, 0) + count


def _scan(evaluator: FitnessEvaluator, start: int, stop: int) -> _Partial:
    n, k = evaluator.n_rows, evaluator.weight
    part = _Partial()
    gen = iter_colex_masks(n, k, start, stop)
    while True:
        chunk = [x for _, x in zip(range(_CHUNK), gen)]
        if not chunk:
            return part
        values = evaluator.batch(_ints_to_bits(chunk, n))
        keys, counts = np.unique(np.round(values, HISTOGRAM_DECIMALS), return_counts=True)
        lo = float(values.min())
        hits = [chunk[i] for i in np.flatnonzero(values == lo)]
        part.merge(_Partial(lo, hits[:MAX_LISTED_OPTIMA], len(hits), dict(zip(keys.tolist(), counts.tolist()))))


def _scan_job(args):
    arr, target_index, exponent, aggregation, start, stop = args
    return _scan(FitnessEvaluator(arr, target_index, exponent, aggregation), start, stop)


def exhaustive_search(
    arr: OrthogonalArray,
    target_index: int,
    exponent: float = 2.0,
    aggregation: str = GLOBAL,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> OracleReport:
    """Evaluate every weight-p mask and report the optima and fitness spectrum.

    Masks are visited in colex order. With ``workers > 1`` the rank range is
    split into contiguous pieces scanned in separate processes; the merged
    result does not depend on the split.
    """
    p = arr.params
    weight = removal_weight(p, target_index)
    total = math.comb(p.n_rows, weight)
    if total > cap:
        raise OracleRefused(f"C({p.n_rows},{weight}) = {total:.3e} masks exceeds the enumeration cap {cap:.0e}")
    if p.n_rows > 64:
        raise OracleRefused("exhaustive search supports at most 64 rows")
    if workers <= 1:
        result = _scan(FitnessEvaluator(arr, target_index, exponent, aggregation), 0, total)
    else:
        bounds = np.linspace(0, total, workers + 1).astype(np.int64).tolist()
        jobs = [(arr, target_index, exponent, aggregation, a, b) for a, b in zip(bounds, bounds[1:])]
        result = _Partial()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_scan_job, jobs):
                result.merge(part)
    return OracleReport(
        instance_params=p,
        target_index=target_index,
        masks_enumerated=total,
        min_fitness=result.min_fitness,
        optimal_count=result.optimal_count,
        optimal_masks=[RemovalMask(_ints_to_bits([x], p.n_rows)[0]) for x in result.optimal],
        fitness_histogram=dict(sorted(result.histogram.items())),
    )


def verify_ga_result(
    arr: OrthogonalArray, target_index: int, report: RunReport, exponent: float = 2.0, aggregation: str = GLOBAL
) -> bool:
    """Recompute a run's best fitness along the reference path and cross-check success."""
    try:
        value = minkowski_fitness(arr, report.best_mask, target_index, exponent, aggregation)
    except ValueError:
        return False
    if value != report.best_fitness:
        return False
    if report.success != (value == 0.0):
        return False
    if report.success:
        return is_orthogonal_array(remove_rows(arr, report.best_mask))
    return True
