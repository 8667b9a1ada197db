"""Weight-preserving variation operators on 0/1 numpy vectors.

All operators take and return ``uint8`` arrays and draw randomness from a
``numpy.random.Generator``; none of them modifies its inputs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "random_balanced_mask",
    "map_of_ones_crossover",
    "counter_based_crossover",
    "swap_mutation",
    "CROSSOVERS",
]


def random_balanced_mask(length: int, weight: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random 0/1 vector of the given length with exactly ``weight`` ones."""
    if not 0 < weight < length:
        raise ValueError(f"weight must satisfy 0 < p < N, got p={weight}, N={length}")
    bits = np.zeros(length, dtype=np.uint8)
    bits[rng.choice(length, size=weight, replace=False)] = 1
    return bits


def _check_parents(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"parents must be vectors of equal length, got {a.shape} and {b.shape}")
    wa, wb = int(a.sum()), int(b.sum())
    if wa != wb:
        raise ValueError(f"parents must have equal weight, got {wa} and {wb}")
    return wa


def map_of_ones_crossover(parent_a, parent_b, rng: np.random.Generator) -> np.ndarray:
    """Recombine the sorted 1-position lists of two equal-weight parents.

    Slot j of the child's map takes parent_a's or parent_b's j-th position
    with equal probability. If that position is already used the other
    parent's j-th position is tried; if both are used the slot is deferred.
    Deferred slots are filled at the end by drawing without replacement from
    the parents' still unused 1-positions.
    """
    a = np.asarray(parent_a, dtype=np.uint8)
    b = np.asarray(parent_b, dtype=np.uint8)
    weight = _check_parents(a, b)
    map_a = np.flatnonzero(a).tolist()
    map_b = np.flatnonzero(b).tolist()
    picks = rng.integers(0, 2, size=weight).tolist()
    child: set[int] = set()
    deferred = 0
    for first, pa, pb in zip(picks, map_a, map_b):
        x, y = (pb, pa) if first else (pa, pb)
        if x not in child:
            child.add(x)
        elif y not in child:
            child.add(y)
        else:
            deferred += 1
    # cannot trigger with sorted maps (a[j] == b[i] and b[j] == a[i'] for i, i' < j
    # would contradict sortedness); kept so the child weight never depends on it
    if deferred:
        unused = sorted(set(map_a).union(map_b) - child)
        child.update(rng.choice(unused, size=deferred, replace=False).tolist())
    out = np.zeros_like(a)
    out[list(child)] = 1
    return out


def counter_based_crossover(parent_a, parent_b, rng: np.random.Generator) -> np.ndarray:
    """Uniform per-locus copying with counters of placed ones and zeros.

    As soon as p ones (or N - p zeros) have been placed, every remaining
    locus receives the complementary value.
    """
    a = np.asarray(parent_a, dtype=np.uint8)
    b = np.asarray(parent_b, dtype=np.uint8)
    weight = _check_parents(a, b)
    n = a.size
    take_b = rng.integers(0, 2, size=n).astype(bool)
    drawn = np.where(take_b, b, a)
    ones = np.cumsum(drawn)
    zeros = np.arange(1, n + 1) - ones
    # the two counters sum to N at the last locus, so one of them always saturates
    stop = int(np.flatnonzero((ones == weight) | (zeros == n - weight))[0])
    out = drawn.copy()
    out[stop + 1 :] = 0 if ones[stop] == weight else 1
    return out


def swap_mutation(mask, rng: np.random.Generator) -> np.ndarray:
    """Exchange one uniformly chosen 1-position with one uniformly chosen 0-position."""
    bits = np.asarray(mask, dtype=np.uint8)
    ones = np.flatnonzero(bits)
    zeros = np.flatnonzero(bits == 0)
    if ones.size == 0 or zeros.size == 0:
        raise ValueError("swap mutation needs at least one 1 and one 0")
    out = bits.copy()
    i = ones[rng.integers(ones.size)]
    j = zeros[rng.integers(zeros.size)]
    out[i], out[j] = 0, 1
    return out


CROSSOVERS = {
    "map_of_ones": map_of_ones_crossover,
    "counter_based": counter_based_crossover,
}
