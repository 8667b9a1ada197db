"""Orthogonal array representation, construction and verification.

Rows are kept as an indexed list (a read-only ``uint8`` matrix), never as a
set: replicated benchmark instances contain every row several times and
removal masks address rows by position.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "OaParams",
    "OrthogonalArray",
    "TupleCountTable",
    "OaFormatError",
    "parity_check_array",
    "replicate_and_shuffle",
    "tuple_counts",
    "is_orthogonal_array",
    "remove_rows",
    "removal_weight",
    "serialize",
    "parse",
    "read_array",
    "write_array",
    "from_rows",
]


class OaFormatError(ValueError):
    """Raised when an array text file is malformed."""


@dataclass(frozen=True)
class OaParams:
    n_rows: int
    n_cols: int
    alphabet: int
    strength: int

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"array must have at least one row and column, got {self.n_rows}x{self.n_cols}")
        if self.alphabet < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.alphabet}")
        if not 1 <= self.strength <= self.n_cols:
            raise ValueError(f"strength must be in [1, {self.n_cols}], got {self.strength}")

    @property
    def n_tuples(self) -> int:
        return self.alphabet**self.strength

    @property
    def index(self) -> int | None:
        """N / s^t, or None when the row count is not a multiple of s^t."""
        q, r = divmod(self.n_rows, self.n_tuples)
        return q if r == 0 else None


class OrthogonalArray:
    """An N x k array over ``{0, ..., s-1}`` together with its claimed strength.

    Construction only checks shape and alphabet; use :func:`is_orthogonal_array`
    to check balancedness.
    """

    __slots__ = ("params", "rows")

    def __init__(self, rows, alphabet: int = 2, strength: int = 2):
        arr = np.array(rows, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError(f"rows must form a 2-D matrix, got shape {arr.shape}")
        params = OaParams(arr.shape[0], arr.shape[1], alphabet, strength)
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet):
            raise ValueError(f"entries must lie in 0..{alphabet - 1}")
        data = arr.astype(np.uint8)
        data.flags.writeable = False
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "rows", data)

    def __setattr__(self, name, value):
        raise AttributeError("OrthogonalArray is immutable")

    def __eq__(self, other):
        if not isinstance(other, OrthogonalArray):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.rows, other.rows)

    __hash__ = None

    def __reduce__(self):
        return (OrthogonalArray, (self.rows, self.params.alphabet, self.params.strength))

    def __len__(self):
        return self.params.n_rows

    def __repr__(self):
        p = self.params
        return f"OrthogonalArray(N={p.n_rows}, k={p.n_cols}, s={p.alphabet}, t={p.strength})"

    def row_multiset(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for row in map(tuple, self.rows.tolist()):
            out[row] = out.get(row, 0) + 1
        return out

    def column_subsets(self) -> list[tuple[int, ...]]:
        """All t-column subsets in lexicographic order (0-based columns)."""
        return list(itertools.combinations(range(self.params.n_cols), self.params.strength))


@dataclass(frozen=True)
class TupleCountTable:
    column_subset: tuple[int, ...]
    counts: tuple[int, ...]


def parity_check_array(strength: int) -> OrthogonalArray:
    """The zero-sum OA(2^t, t+1, 2, t).

    The first t columns list all binary t-vectors in lexicographic order and
    the last column holds their XOR.
    """
    if strength < 1:
        raise ValueError(f"strength must be >= 1, got {strength}")
    values = np.arange(2**strength)
    shifts = np.arange(strength - 1, -1, -1)
    head = (values[:, None] >> shifts) & 1
    parity = head.sum(axis=1) % 2
    return OrthogonalArray(np.column_stack([head, parity]), alphabet=2, strength=strength)


def replicate_and_shuffle(base: OrthogonalArray, index: int, seed: int) -> OrthogonalArray:
    """Stack ``index`` copies of ``base`` and shuffle the rows.

    The permutation comes from a PCG64 generator seeded with ``seed``, so the
    same seed always yields the same instance.
    """
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    stacked = np.tile(base.rows, (index, 1))
    perm = np.random.default_rng(seed).permutation(len(stacked))
    p = base.params
    return OrthogonalArray(stacked[perm], alphabet=p.alphabet, strength=p.strength)


def tuple_codes(arr: OrthogonalArray, column_subset: Sequence[int]) -> np.ndarray:
    """Per-row tuple index for the projection onto ``column_subset``.

    The lowest column is the most significant base-s digit.
    """
    p = arr.params
    cols = tuple(column_subset)
    if len(cols) != p.strength or len(set(cols)) != len(cols):
        raise ValueError(f"column subset must contain {p.strength} distinct columns, got {cols}")
    if any(c < 0 or c >= p.n_cols for c in cols):
        raise ValueError(f"column indices must lie in 0..{p.n_cols - 1}, got {cols}")
    weights = p.alphabet ** np.arange(p.strength - 1, -1, -1)
    return arr.rows[:, sorted(cols)].astype(np.int64) @ weights


def tuple_counts(arr: OrthogonalArray, column_subset: Sequence[int]) -> TupleCountTable:
    codes = tuple_codes(arr, column_subset)
    counts = np.bincount(codes, minlength=arr.params.n_tuples)
    return TupleCountTable(tuple(sorted(column_subset)), tuple(int(c) for c in counts))


def is_orthogonal_array(arr: OrthogonalArray) -> bool:
    lam = arr.params.index
    if lam is None:
        return False
    for cols in arr.column_subsets():
        if any(c != lam for c in tuple_counts(arr, cols).counts):
            return False
    return True


def removal_weight(params: OaParams, target_index: int) -> int:
    """Number of rows to delete to go from index lambda to ``target_index``."""
    lam = params.index
    if lam is None:
        raise ValueError(f"N={params.n_rows} is not a multiple of s^t={params.n_tuples}")
    if not 1 <= target_index < lam:
        raise ValueError(f"target index must satisfy 1 <= lambda' < {lam}, got {target_index}")
    return (lam - target_index) * params.n_tuples


def _mask_bits(mask) -> np.ndarray:
    bits = np.asarray(mask)
    if bits.ndim != 1:
        raise ValueError("mask must be one-dimensional")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("mask entries must be 0 or 1")
    return bits.astype(bool)


def remove_rows(arr: OrthogonalArray, mask) -> OrthogonalArray:
    """Delete the rows at the 1-positions of ``mask``, keeping order.

    The mask weight p must satisfy p = (lambda - lambda') * s^t with
    1 <= lambda' < lambda.
    """
    p = arr.params
    bits = _mask_bits(mask)
    if bits.size != p.n_rows:
        raise ValueError(f"mask length {bits.size} != number of rows {p.n_rows}")
    lam = p.index
    weight = int(bits.sum())
    kept = p.n_rows - weight
    if lam is None or weight == 0 or kept <= 0 or kept % p.n_tuples:
        raise ValueError(
            f"mask weight {weight} does not reduce N={p.n_rows} to a positive multiple of s^t={p.n_tuples}"
        )
    return OrthogonalArray(arr.rows[~bits], alphabet=p.alphabet, strength=p.strength)


def serialize(arr: OrthogonalArray) -> str:
    p = arr.params
    lines = [f"{p.n_rows} {p.n_cols} {p.alphabet} {p.strength}"]
    lines.extend(" ".join(map(str, row)) for row in arr.rows.tolist())
    return "\n".join(lines) + "\n"


def parse(text: str) -> OrthogonalArray:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise OaFormatError("empty input")
    try:
        header = [int(x) for x in lines[0].split(" ")]
    except ValueError:
        raise OaFormatError(f"malformed header: {lines[0]!r}") from None
    if len(header) != 4:
        raise OaFormatError(f"header must be 'N k s t', got {lines[0]!r}")
    n, k, s, t = header
    body = lines[1:]
    if len(body) != n:
        raise OaFormatError(f"header declares {n} rows, found {len(body)}")
    rows = []
    for lineno, line in enumerate(body, start=2):
        try:
            row = [int(x) for x in line.split(" ")]
        except ValueError:
            raise OaFormatError(f"line {lineno}: malformed row {line!r}") from None
        if len(row) != k:
            raise OaFormatError(f"line {lineno}: expected {k} symbols, got {len(row)}")
        if any(not 0 <= x < s for x in row):
            raise OaFormatError(f"line {lineno}: symbol outside 0..{s - 1}")
        rows.append(row)
    try:
        return OrthogonalArray(np.array(rows, dtype=np.int64).reshape(n, k), alphabet=s, strength=t)
    except ValueError as exc:
        raise OaFormatError(str(exc)) from None


def read_array(path) -> OrthogonalArray:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())


def write_array(arr: OrthogonalArray, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize(arr))


def from_rows(rows: Iterable[str], strength: int, alphabet: int = 2) -> OrthogonalArray:
    """Build an array from compact strings such as ``"0110"``."""
    return OrthogonalArray([[int(c) for c in r] for r in rows], alphabet=alphabet, strength=strength)
