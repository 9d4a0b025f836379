"""Bitmask subsets of the variable index set.

Bit ``i`` of a mask is set iff axis ``i`` (0-based; the variable the
literature calls X_{i+1}) belongs to the subset.  Every lattice table in
this package is a flat array of length ``2**k`` indexed by such masks.
"""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSubset


@dataclass(frozen=True, order=True)
class SubsetMask:
    bits: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise InvalidSubset(f"dimension bound must be nonnegative, got {self.k}")
        if not 0 <= self.bits < (1 << self.k):
            raise InvalidSubset(f"mask {self.bits:#b} has bits outside [0, {self.k})")

    @classmethod
    def from_axes(cls, axes: Iterable[int], k: int) -> SubsetMask:
        bits = 0
        for a in axes:
            if not 0 <= a < k:
                raise InvalidSubset(f"axis {a} out of range for k={k}")
            bits |= 1 << a
        return cls(bits, k)

    @classmethod
    def full(cls, k: int) -> SubsetMask:
        return cls((1 << k) - 1, k)

    @classmethod
    def coerce(cls, subset, k: int) -> SubsetMask:
        """Accept a SubsetMask, a raw int mask, or an iterable of axes."""
        if isinstance(subset, SubsetMask):
            if subset.k != k and subset.bits >> k:
                raise InvalidSubset(f"mask {subset.bits:#b} has bits outside [0, {k})")
            return subset if subset.k == k else cls(subset.bits, k)
        if isinstance(subset, (int, np.integer)):
            return cls(int(subset), k)
        return cls.from_axes(subset, k)

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.k) if self.bits >> i & 1)

    def __len__(self):
        return self.bits.bit_count()

    def __contains__(self, axis):
        return 0 <= axis < self.k and bool(self.bits >> axis & 1)

    def __iter__(self):
        return iter(self.axes)

    def issubset(self, other: SubsetMask) -> bool:
        return self.bits & ~other.bits == 0

    def __str__(self):
        # 1-based variable labels, as in X_1..X_k
        return "{" + ",".join(str(a + 1) for a in self.axes) + "}"


def popcounts(k: int) -> np.ndarray:
    """Cardinality of every mask in ``range(2**k)``."""
    masks = np.arange(1 << k, dtype=np.uint64)
    return np.bitwise_count(masks).astype(np.int64)
