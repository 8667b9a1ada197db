"""Constant-weight removal masks (the GA chromosome)."""

from __future__ import annotations

import numpy as np

__all__ = ["RemovalMask"]


class RemovalMask:
    """A length-N 0/1 string whose ones mark the rows to delete.

    Instances are immutable. ``np.asarray(mask)`` gives the ``uint8`` bits.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.int64).ravel()
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("mask entries must be 0 or 1")
        data = arr.astype(np.uint8)
        data.flags.writeable = False
        self._bits = data

    @classmethod
    def from_positions(cls, length: int, positions) -> "RemovalMask":
        bits = np.zeros(length, dtype=np.uint8)
        pos = np.asarray(list(positions), dtype=np.int64)
        if len(set(pos.tolist())) != pos.size or (pos.size and (pos.min() < 0 or pos.max() >= length)):
            raise ValueError(f"positions must be distinct indices in 0..{length - 1}")
        bits[pos] = 1
        return cls(bits)

    @classmethod
    def from_string(cls, text: str) -> "RemovalMask":
        if set(text) - {"0", "1"}:
            raise ValueError(f"mask string must contain only 0/1, got {text!r}")
        return cls([int(c) for c in text])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    @property
    def weight(self) -> int:
        return int(self._bits.sum())

    @property
    def map_of_ones(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self._bits).tolist())

    def __array__(self, dtype=None, copy=None):
        return self._bits if dtype is None else self._bits.astype(dtype)

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, RemovalMask):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __str__(self):
        return "".join(map(str, self._bits.tolist()))

    def __repr__(self):
        return f"RemovalMask('{self}')"
