"""Entropies over the Boolean lattice of variable subsets and their Möbius inversion.

All tables are flat float64 arrays of length ``2**k`` indexed by bitmask
(see :mod:`kldecomp.subsets`).  Entropies are in bits.

Sign convention: the interaction information of a nonempty subset S is

    I(S) = -sum_{T subset of S} (-1)^(|S|-|T|) H(X_T)

so singletons carry -H(X_i), pairs carry the (nonnegative) mutual
information, and a negative triple term signals synergy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dist import JointPmf, psum
from .errors import DimensionCapExceeded, InvalidDistribution
from .subsets import SubsetMask, popcounts

MAX_K = 20


def _check_k(k: int) -> None:
    if k > MAX_K:
        raise DimensionCapExceeded(
            f"k={k} exceeds the cap of {MAX_K}: lattice tables have 2**k entries"
        )


@dataclass(frozen=True, eq=False)
class _LatticeTable:
    k: int
    values: np.ndarray

    def __post_init__(self):
        _check_k(self.k)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << self.k,):
            raise InvalidDistribution(f"table for k={self.k} needs {1 << self.k} entries, got {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __getitem__(self, subset) -> float:
        return float(self.values[SubsetMask.coerce(subset, self.k).bits])

    def __len__(self):
        return len(self.values)

    def to_json(self) -> dict:
        return {"k": self.k, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["k"]), doc["values"])


class EntropyTable(_LatticeTable):
    """H(X_S) for every subset S; the entry at the empty set is 0."""

    def violations(self, alphabet_sizes=None, tolerance: float = 1e-12) -> list[str]:
        out = []
        v = self.values
        if v[0] != 0:
            out.append(f"H(empty) = {v[0]!r}, expected 0")
        if np.any(v < -tolerance):
            out.append("negative entropies present")
        for s in range(1, len(v)):
            for i in range(self.k):
                bit = 1 << i
                if s & bit and v[s ^ bit] > v[s] + tolerance:
                    out.append(f"monotonicity fails: H({SubsetMask(s ^ bit, self.k)}) > H({SubsetMask(s, self.k)})")
        if alphabet_sizes is not None:
            logs = np.log2(np.asarray(alphabet_sizes, dtype=np.float64))
            for s in range(1, len(v)):
                bound = sum(logs[i] for i in SubsetMask(s, self.k).axes)
                if v[s] > bound + tolerance:
                    out.append(f"H({SubsetMask(s, self.k)}) = {v[s]!r} exceeds log2 alphabet bound {bound!r}")
        return out


class InteractionTable(_LatticeTable):
    """I(S) for every nonempty subset S.

    The empty-set entry is undefined and stored as 0.
    """


def _entropy_bits(p: np.ndarray) -> float:
    p = p.ravel()
    nz = p[p > 0]
    return -psum(nz * np.log2(nz))


def entropy_table(joint: JointPmf) -> EntropyTable:
    """Shannon entropy of every subset marginal of ``joint``.

    Marginals are produced top-down: the marginal of S is obtained from the
    marginal of S plus one axis by summing that axis out.  Axes are removed
    in decreasing index order, which gives every subset exactly one parent,
    so a depth-first walk touches each marginal once while keeping at most k
    tensors alive.
    """
    k = joint.k
    _check_k(k)
    values = np.zeros(1 << k, dtype=np.float64)

    def visit(tensor: np.ndarray, axes: tuple[int, ...], mask: int, floor: int):
        values[mask] = _entropy_bits(tensor)
        for pos, a in enumerate(axes):
            if a >= floor:
                break
            child_mask = mask & ~(1 << a)
            if child_mask == 0:
                continue  # H(empty) = 0
            # move the summed axis last so the reduction is contiguous/pairwise
            moved = np.ascontiguousarray(np.moveaxis(tensor, pos, -1))
            visit(moved.sum(axis=-1), axes[:pos] + axes[pos + 1:], child_mask, a)

    visit(joint.float_probs, tuple(range(k)), (1 << k) - 1, k)
    return EntropyTable(k, values)


def interaction_table_naive(h: EntropyTable) -> InteractionTable:
    """Literal alternating sum over all (S, T subset of S) pairs; O(3**k)."""
    k = h.k
    H = h.values
    out = np.zeros(1 << k, dtype=np.float64)
    for s in range(1, 1 << k):
        size_s = s.bit_count()
        acc = 0.0
        t = s
        while True:
            sign = -1.0 if (size_s - t.bit_count()) & 1 else 1.0
            acc += sign * H[t]
            if t == 0:
                break
            t = (t - 1) & s
        out[s] = -acc
    return InteractionTable(k, out)


def _mobius(values: np.ndarray, k: int) -> np.ndarray:
    """In-place Möbius transform over subsets: g(S) = sum_T (-1)^|S\\T| f(T)."""
    for i in range(k):
        view = values.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]
    return values


def _zeta(values: np.ndarray, k: int) -> np.ndarray:
    """In-place zeta transform over subsets: f(S) = sum_{T subset of S} g(T)."""
    for i in range(k):
        view = values.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return values


def interaction_table_fast(h: EntropyTable) -> InteractionTable:
    """Möbius inversion of the negentropy, O(k * 2**k)."""
    out = _mobius(-h.values.copy(), h.k)
    out[0] = 0.0
    return InteractionTable(h.k, out)


def mobius_roundtrip_check(h: EntropyTable) -> float:
    """Largest |sum_{nonempty T subset of S} I(T) + H(X_S)| over nonempty S."""
    t = interaction_table_fast(h)
    recon = _zeta(t.values.copy(), h.k)
    if h.k == 0:
        return 0.0
    return float(np.max(np.abs(recon[1:] + h.values[1:])))


def total_interaction_by_order(t: InteractionTable) -> np.ndarray:
    """Sum of I(S) over all S with |S| = r, for r = 0..k.

    Index r of the result holds the r-way total; entry 0 is always 0.
    """
    sizes = popcounts(t.k)
    out = np.zeros(t.k + 1, dtype=np.float64)
    for r in range(1, t.k + 1):
        out[r] = psum(t.values[sizes == r])
    return out


def total_correlation_entropy(source: Union[JointPmf, EntropyTable]) -> float:
    """sum_i H(X_i) - H(X_[k]), from the entropy table."""
    h = source if isinstance(source, EntropyTable) else entropy_table(source)
    singles = [h.values[1 << i] for i in range(h.k)]
    return psum(singles) - float(h.values[-1])


def total_correlation_interactions(t: InteractionTable) -> float:
    """sum_{r >= 2} of the r-way interaction totals."""
    return psum(total_interaction_by_order(t)[2:])
