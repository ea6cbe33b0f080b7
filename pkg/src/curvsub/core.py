"""Ground sets, bit-mask subsets, and oracle query accounting."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np

# Exhaustive operations (value tables, tilde curvature, brute-force scans)
# enumerate all 2^n subsets and are capped here by default.
TABLE_LIMIT = 12

# Hard cap for full value tables; 2^22 doubles is 32 MB.
_TABLE_HARD_LIMIT = 22


@dataclass(frozen=True)
class GroundSet:
    """A finite universe of n elements, optionally labeled."""

    n: int
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground set needs at least one element, got n={self.n}")
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise ValueError("labels length must equal n")
            if len(set(self.labels)) != self.n:
                raise ValueError("labels must be unique")


@dataclass(frozen=True, order=True)
class Subset:
    """An immutable subset of {0, ..., n-1} stored as a bit mask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"subset needs a ground set of size >= 1, got n={self.n}")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} has bits outside ground set of size {self.n}")

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Subset":
        mask = 0
        for j in indices:
            if not 0 <= j < n:
                raise ValueError(f"element {j} outside ground set of size {n}")
            mask |= 1 << j
        return cls(mask, n)

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def indices(self) -> Tuple[int, ...]:
        return tuple(j for j in range(self.n) if self.mask >> j & 1)

    def contains(self, j: int) -> bool:
        return bool(self.mask >> j & 1)

    def add(self, j: int) -> "Subset":
        return Subset(self.mask | (1 << j), self.n)

    def remove(self, j: int) -> "Subset":
        return Subset(self.mask & ~(1 << j), self.n)

    def union(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.mask | other.mask, self.n)

    def intersection(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.mask & other.mask, self.n)

    def difference(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.mask & ~other.mask, self.n)

    def complement(self) -> "Subset":
        return Subset(((1 << self.n) - 1) ^ self.mask, self.n)

    def issubset(self, other: "Subset") -> bool:
        self._check_same_ground(other)
        return self.mask & ~other.mask == 0

    def _check_same_ground(self, other: "Subset") -> None:
        if self.n != other.n:
            raise ValueError(f"ground-set mismatch: {self.n} vs {other.n}")

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return self.cardinality

    def __repr__(self) -> str:
        return f"Subset({self.mask:#x}, n={self.n})"


@dataclass
class QuerySession:
    """Counts oracle evaluations; one session belongs to one caller."""

    count: int = 0

    def tick(self) -> None:
        self.count += 1


def all_masks(n: int, limit: int = _TABLE_HARD_LIMIT) -> np.ndarray:
    """All subset masks 0..2^n-1 as uint64, for vectorized table work."""
    if n > limit:
        raise_scale(n, limit)
    return np.arange(1 << n, dtype=np.uint64)


def popcount(masks: np.ndarray) -> np.ndarray:
    """Per-element popcount of a uint64 mask array."""
    return np.bitwise_count(masks).astype(np.int64)


def indicator_columns(masks: np.ndarray, n: int) -> np.ndarray:
    """(len(masks), n) float matrix of membership indicators."""
    cols = [(masks >> np.uint64(j)) & np.uint64(1) for j in range(n)]
    return np.stack(cols, axis=1).astype(float)


def raise_scale(n: int, limit: int) -> None:
    from .errors import ScaleError

    raise ScaleError(f"n={n} exceeds the exhaustive-scale limit of {limit}")
