"""Exact joint law of k ordered draws without replacement.

The sample space is the set of ordered k-tuples of symbols, so each draw
X_j is its own variable.  All arithmetic is in :class:`fractions.Fraction`,
which makes every single-draw marginal equal the population proportions
exactly rather than to within rounding.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from .dist import RATIONAL, Alphabet, JointPmf, ReferenceSpec
from .errors import ArityMismatch, InputFormatError, InvalidPopulation, UnknownSymbol


@dataclass(frozen=True)
class PopulationSpec:
    """A finite population of labelled items and a number of draws ``k``."""

    counts: Mapping[str, int]
    k: int

    def __post_init__(self):
        counts = {}
        for sym, c in self.counts.items():
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise InvalidPopulation(f"count for {sym!r} must be an integer, got {c!r}")
            if c < 1:
                # a zero count would give Q(sym) = 0 on the declared alphabet
                raise InvalidPopulation(f"count for {sym!r} must be >= 1, got {c}")
            counts[str(sym)] = int(c)
        if not counts:
            raise InvalidPopulation("population has no symbols")
        if len(counts) != len(self.counts):
            raise InvalidPopulation("symbol labels collide after conversion to strings")
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidPopulation(f"number of draws must be a positive integer, got {self.k!r}")
        n = sum(counts.values())
        if self.k > n:
            raise InvalidPopulation(f"cannot draw k={self.k} items from a population of n={n}")
        object.__setattr__(self, "counts", MappingProxyType(dict(sorted(counts.items()))))
        object.__setattr__(self, "k", int(self.k))

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(tuple(self.counts))

    def proportions(self) -> dict[str, Fraction]:
        n = self.n
        return {s: Fraction(c, n) for s, c in self.counts.items()}

    @classmethod
    def from_json(cls, doc: Mapping) -> PopulationSpec:
        try:
            counts = doc["counts"]
            k = doc["k"]
            if not isinstance(counts, Mapping):
                raise InputFormatError(f"'counts' must be an object, got {type(counts).__name__}")
        except (KeyError, TypeError) as exc:
            raise InputFormatError(f"malformed population document: {exc!r}") from exc
        return cls(dict(counts), k)

    def to_json(self) -> dict:
        return {"counts": dict(self.counts), "k": self.k}


def sequence_probability(spec: PopulationSpec, draws: Sequence) -> Fraction:
    """P(X_1 = draws[0], ..., X_k = draws[k-1]) for ordered draws.

    Each factor is (items of that symbol still in the urn) / (items left).
    An over-drawn symbol gives probability zero.
    """
    if len(draws) != spec.k:
        raise ArityMismatch(f"expected {spec.k} draws, got {len(draws)}")
    remaining = dict(spec.counts)
    left = spec.n
    prob = Fraction(1)
    for sym in draws:
        sym = str(sym)
        if sym not in remaining:
            raise UnknownSymbol(f"symbol {sym!r} not in population {list(spec.counts)}")
        if remaining[sym] == 0:
            return Fraction(0)
        prob *= Fraction(remaining[sym], left)
        remaining[sym] -= 1
        left -= 1
    return prob


def joint_from_population(spec: PopulationSpec) -> JointPmf:
    """Rational-mode joint PMF over all ordered k-tuples of symbols."""
    alphabet = spec.alphabet
    m = len(alphabet)
    counts = [spec.counts[s] for s in alphabet]
    n = spec.n
    probs = np.empty((m,) * spec.k, dtype=object)

    # depth-first over prefixes so each prefix probability is computed once
    def fill(prefix: list[int], prob: Fraction, remaining: list[int], left: int):
        if len(prefix) == spec.k:
            probs[tuple(prefix)] = prob
            return
        for i in range(m):
            c = remaining[i]
            if c == 0:
                # every completion of this prefix is impossible
                for tail in itertools.product(range(m), repeat=spec.k - len(prefix) - 1):
                    probs[tuple(prefix) + (i,) + tail] = Fraction(0)
                continue
            remaining[i] -= 1
            prefix.append(i)
            fill(prefix, prob * Fraction(c, left), remaining, left - 1)
            prefix.pop()
            remaining[i] += 1

    fill([], Fraction(1), counts, n)
    return JointPmf((alphabet,) * spec.k, probs, RATIONAL)


def reference_from_population(spec: PopulationSpec) -> ReferenceSpec:
    """Homogeneous reference with Q(s) = counts[s] / n on every axis."""
    return ReferenceSpec.homogeneous(spec.proportions(), spec.k)
