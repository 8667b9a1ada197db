"""Minkowski-distance fitness of a removal mask.

For every t-column subset (lexicographic order) and every t-tuple, the
reduced array's occurrence count is compared with the target index lambda'.
The fitness is a Minkowski norm of those deviations; it is zero exactly when
the reduced array is an orthogonal array of index lambda'.
"""

from __future__ import annotations

import math

import numpy as np

from .oa import OrthogonalArray, remove_rows, tuple_counts, tuple_codes

__all__ = [
    "GLOBAL",
    "PER_BLOCK",
    "deviation_vector",
    "minkowski_norm",
    "minkowski_fitness",
    "FitnessEvaluator",
]

GLOBAL = "global"
PER_BLOCK = "per_block"
AGGREGATIONS = (GLOBAL, PER_BLOCK)


def _check_target(arr: OrthogonalArray, weight: int, target_index: int) -> None:
    p = arr.params
    if target_index < 1 or (p.n_rows - weight) != target_index * p.n_tuples:
        raise ValueError(
            f"mask weight {weight} is inconsistent with lambda'={target_index} "
            f"(need N - p = {target_index} * {p.n_tuples})"
        )
    lam = p.index
    if lam is None or target_index >= lam:
        raise ValueError(f"lambda'={target_index} must be smaller than the array index {lam}")


def deviation_vector(arr: OrthogonalArray, mask, target_index: int) -> np.ndarray:
    """Occurrence counts minus lambda', concatenated over all column subsets."""
    bits = np.asarray(mask)
    _check_target(arr, int(bits.sum()), target_index)
    reduced = remove_rows(arr, bits)
    blocks = [
        np.asarray(tuple_counts(reduced, cols).counts, dtype=np.int64) - target_index
        for cols in reduced.column_subsets()
    ]
    return np.concatenate(blocks)


def _power_sum(dev: np.ndarray, exponent: float) -> float:
    a = np.abs(dev)
    if float(exponent).is_integer():
        # integer powers of integers are exact, so every code path agrees bit for bit
        return float(sum(int(x) ** int(exponent) for x in a.tolist()))
    return float(np.sum(a.astype(np.float64) ** exponent))


def _root(total: float, exponent: float) -> float:
    if exponent == 2:
        return math.sqrt(total)
    if exponent == 1:
        return total
    return total ** (1.0 / exponent)


def minkowski_norm(dev: np.ndarray, exponent: float = 2.0, aggregation: str = GLOBAL, block_size: int | None = None) -> float:
    """q-norm of a deviation vector.

    ``global`` takes one norm over the whole vector; ``per_block`` sums the
    norms of consecutive blocks of ``block_size`` entries.
    """
    if exponent < 1:
        raise ValueError(f"Minkowski exponent must be >= 1, got {exponent}")
    dev = np.asarray(dev, dtype=np.int64)
    if aggregation == GLOBAL:
        return _root(_power_sum(dev, exponent), exponent)
    if aggregation == PER_BLOCK:
        if not block_size or dev.size % block_size:
            raise ValueError("per_block aggregation needs a block_size dividing the vector length")
        return math.fsum(_root(_power_sum(b, exponent), exponent) for b in dev.reshape(-1, block_size))
    raise ValueError(f"unknown aggregation {aggregation!r}, expected one of {AGGREGATIONS}")


def minkowski_fitness(
    arr: OrthogonalArray, mask, target_index: int, exponent: float = 2.0, aggregation: str = GLOBAL
) -> float:
    """Reference fitness: remove the rows, count tuples, take the norm."""
    dev = deviation_vector(arr, mask, target_index)
    return minkowski_norm(dev, exponent, aggregation, arr.params.n_tuples)


class FitnessEvaluator:
    """Fast fitness for repeated evaluation on one instance.

    Each row's tuple code under every column subset is precomputed into a
    one-hot incidence matrix, so the counts of a reduced array are a single
    vector-matrix product. Produces the same floats as
    :func:`minkowski_fitness`.
    """

    def __init__(self, arr: OrthogonalArray, target_index: int, exponent: float = 2.0, aggregation: str = GLOBAL):
        p = arr.params
        if p.index is None or not 1 <= target_index < p.index:
            raise ValueError(f"lambda'={target_index} must satisfy 1 <= lambda' < lambda={p.index}")
        if exponent < 1:
            raise ValueError(f"Minkowski exponent must be >= 1, got {exponent}")
        if aggregation not in AGGREGATIONS:
            raise ValueError(f"unknown aggregation {aggregation!r}")
        self.array = arr
        self.target_index = target_index
        self.exponent = float(exponent)
        self.aggregation = aggregation
        self.n_rows = p.n_rows
        self.weight = (p.index - target_index) * p.n_tuples
        self.block_size = p.n_tuples
        subsets = arr.column_subsets()
        self.n_entries = len(subsets) * p.n_tuples
        incidence = np.zeros((p.n_rows, self.n_entries), dtype=np.int64)
        rows = np.arange(p.n_rows)
        for j, cols in enumerate(subsets):
            incidence[rows, j * p.n_tuples + tuple_codes(arr, cols)] = 1
        self._incidence = incidence
        self._full_counts = incidence.sum(axis=0)
        self._fast_l2 = self.exponent == 2.0 and aggregation == GLOBAL

    def deviations(self, bits) -> np.ndarray:
        removed = np.asarray(bits, dtype=np.int64) @ self._incidence
        return self._full_counts - removed - self.target_index

    def __call__(self, bits) -> float:
        dev = self.deviations(bits)
        if self._fast_l2:
            return math.sqrt(int(dev @ dev))
        return minkowski_norm(dev, self.exponent, self.aggregation, self.block_size)

    def batch(self, bit_matrix: np.ndarray) -> np.ndarray:
        """Fitness of every row of a (B, N) 0/1 matrix."""
        dev = self._full_counts - np.asarray(bit_matrix, dtype=np.int64) @ self._incidence - self.target_index
        if self._fast_l2:
            return np.sqrt(np.einsum("ij,ij->i", dev, dev).astype(np.float64))
        return np.array([minkowski_norm(d, self.exponent, self.aggregation, self.block_size) for d in dev])
