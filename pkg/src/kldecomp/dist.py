"""Dense discrete distributions over products of finite alphabets.

Tensors are stored row-major with axis 0 (the first variable) varying
slowest, so the flat ``probs`` list of the JSON format is simply
``tensor.ravel()`` in C order.

Two arithmetic modes are supported.  ``"rational"`` tensors hold
:class:`fractions.Fraction` objects (numpy ``object`` dtype) and are exact;
``"float64"`` tensors are ordinary float arrays.  Rational tensors are
converted to float exactly once, at the point where logarithms are needed.
"""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce

import numpy as np

from .errors import (
    AlphabetMismatch,
    ArityMismatch,
    InputFormatError,
    InvalidDistribution,
    InvalidSubset,
    KLDecompError,
    ReferenceNotPositive,
    UnknownSymbol,
)
from .subsets import SubsetMask

FLOAT64 = "float64"
RATIONAL = "rational"
MODES = (FLOAT64, RATIONAL)

DEFAULT_TOLERANCE = 1e-12


def psum(values) -> float:
    """Pairwise sum of a float array.

    numpy's contiguous add-reduction is a blocked pairwise summation, with
    O(log n) error growth instead of O(n) for a left fold.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float(np.add.reduce(arr))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, str):
        return Fraction(x)
    raise InputFormatError(f"cannot read {x!r} as an exact rational")


def _to_float(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        # float(Fraction) is correctly rounded
        return np.vectorize(float, otypes=[np.float64])(arr)
    return arr


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of symbol labels; sorted lexicographically on construction."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        if not syms:
            raise InvalidDistribution("alphabet must be nonempty")
        if len(set(syms)) != len(syms):
            raise InvalidDistribution(f"duplicate symbols in alphabet {list(syms)}")
        object.__setattr__(self, "symbols", tuple(sorted(syms)))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol) -> int:
        try:
            return self.symbols.index(str(symbol))
        except ValueError:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet {list(self.symbols)}") from None


def _coerce_alphabets(alphabets) -> tuple[Alphabet, ...]:
    return tuple(a if isinstance(a, Alphabet) else Alphabet(tuple(a)) for a in alphabets)


def _coerce_probs(probs, mode: str | None) -> tuple[np.ndarray, str]:
    arr = np.asarray(probs) if not isinstance(probs, np.ndarray) else probs
    if mode is None:
        mode = RATIONAL if arr.dtype == object else FLOAT64
    if mode not in MODES:
        raise InputFormatError(f"unknown arithmetic mode {mode!r}")
    if mode == RATIONAL:
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(np.asarray(arr, dtype=object)):
            out[idx] = _as_fraction(x)
    else:
        out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out, mode


@dataclass(frozen=True, eq=False)
class _Pmf:
    alphabets: tuple[Alphabet, ...]
    probs: np.ndarray
    mode: str | None = None
    tolerance: float = field(default=DEFAULT_TOLERANCE, repr=False)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        alphabets = _coerce_alphabets(self.alphabets)
        probs, mode = _coerce_probs(self.probs, self.mode)
        shape = tuple(len(a) for a in alphabets)
        if probs.shape != shape:
            if probs.size != math.prod(shape):
                raise InvalidDistribution(
                    f"tensor has {probs.size} entries, alphabets require {math.prod(shape)}"
                )
            probs = probs.reshape(shape)
            probs.flags.writeable = False
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "mode", mode)
        if self.check:
            problems = validate_pmf(self, self.tolerance)
            if problems:
                raise InvalidDistribution("; ".join(problems))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def ndim(self) -> int:
        return len(self.alphabets)

    @property
    def is_rational(self) -> bool:
        return self.mode == RATIONAL

    @cached_property
    def float_probs(self) -> np.ndarray:
        """float64 view of the tensor (the single rational->float conversion)."""
        out = _to_float(self.probs)
        if out is not self.probs:
            out.flags.writeable = False
        return out

    def _mask(self) -> SubsetMask:
        raise NotImplementedError

    def prob(self, *symbols) -> Fraction | float:
        if len(symbols) != self.ndim:
            raise ArityMismatch(f"expected {self.ndim} symbols, got {len(symbols)}")
        return self.probs[tuple(a.index(s) for a, s in zip(self.alphabets, symbols))]


@dataclass(frozen=True, eq=False)
class JointPmf(_Pmf):
    """Joint distribution P_k of k discrete variables."""

    @property
    def k(self) -> int:
        return len(self.alphabets)

    def _mask(self) -> SubsetMask:
        return SubsetMask.full(self.k)

    def to_float(self) -> JointPmf:
        if not self.is_rational:
            return self
        return JointPmf(self.alphabets, self.float_probs, FLOAT64, self.tolerance, check=False)


@dataclass(frozen=True, eq=False)
class MarginalPmf(_Pmf):
    """Marginal P_S over the retained axes of ``subset`` (ascending order)."""

    subset: SubsetMask = field(kw_only=True)

    def _mask(self) -> SubsetMask:
        return self.subset


def validate_pmf(p: _Pmf, tolerance: float | None = None) -> list[str]:
    """Return a list of invariant violations (empty when ``p`` is valid)."""
    tol = p.tolerance if tolerance is None else tolerance
    problems = []
    expected = tuple(len(a) for a in p.alphabets)
    if p.probs.shape != expected:
        problems.append(f"shape {p.probs.shape} does not match alphabet sizes {expected}")
    if p.mode == RATIONAL:
        flat = list(p.probs.ravel())
        if any(x < 0 for x in flat):
            problems.append(f"nonnegativity: {sum(x < 0 for x in flat)} negative entries")
        total = sum(flat, Fraction(0))
        if total != 1:
            problems.append(f"normalization: entries sum to {total} (exactly 1 required)")
        return problems
    arr = p.probs
    if not np.all(np.isfinite(arr)):
        problems.append("non-finite entries present")
        return problems
    neg = int(np.count_nonzero(arr < 0))
    if neg:
        problems.append(f"nonnegativity: {neg} negative entries (min {arr.min():.3g})")
    total = psum(arr)
    if abs(total - 1.0) > tol:
        problems.append(f"normalization: entries sum to {total!r} (tolerance {tol:g})")
    return problems


def marginalize(pmf: _Pmf, subset) -> MarginalPmf:
    """Sum out every axis not in ``subset``.

    ``subset`` is a :class:`SubsetMask`, an int mask or an iterable of
    0-based axes, all relative to the original k variables.  When ``pmf`` is
    itself a marginal, ``subset`` must lie inside the marginal's subset.
    """
    own = pmf._mask()
    target = SubsetMask.coerce(subset, own.k)
    if target.bits == 0:
        raise InvalidSubset("cannot marginalize onto the empty set")
    if not target.issubset(own):
        raise InvalidSubset(f"subset {target} is not contained in {own}")
    own_axes = own.axes
    keep = [own_axes.index(a) for a in target.axes]
    drop = [i for i in range(len(own_axes)) if i not in keep]
    alphabets = tuple(pmf.alphabets[i] for i in keep)
    if not drop:
        probs = pmf.probs
    else:
        kept_shape = tuple(pmf.probs.shape[i] for i in keep)
        moved = np.ascontiguousarray(np.transpose(pmf.probs, keep + drop))
        # summed axis is contiguous, so float reductions are pairwise
        probs = moved.reshape(math.prod(kept_shape), -1).sum(axis=1).reshape(kept_shape)
    return MarginalPmf(alphabets, probs, pmf.mode, pmf.tolerance, check=False, subset=target)


@dataclass(frozen=True, eq=False)
class ReferenceSpec:
    """Per-dimension reference PMFs Q_1..Q_k of a product reference.

    Every Q_i must be strictly positive unless ``allow_zero`` is set.
    """

    alphabets: tuple[Alphabet, ...]
    per_dimension: tuple[np.ndarray, ...]
    allow_zero: bool = False
    tolerance: float = field(default=DEFAULT_TOLERANCE, repr=False)

    def __post_init__(self):
        alphabets = _coerce_alphabets(self.alphabets)
        if len(alphabets) != len(self.per_dimension):
            raise AlphabetMismatch(
                f"{len(alphabets)} alphabets but {len(self.per_dimension)} reference PMFs"
            )
        pmfs = []
        for i, (alpha, q) in enumerate(zip(alphabets, self.per_dimension)):
            marginal = MarginalPmf(
                (alpha,), np.asarray(q).ravel(),
                None, self.tolerance, check=False, subset=SubsetMask(1 << i, len(alphabets)),
            )
            problems = validate_pmf(marginal, self.tolerance)
            if problems:
                raise InvalidDistribution(f"reference Q_{i + 1}: " + "; ".join(problems))
            if not self.allow_zero:
                for s, x in zip(alpha, marginal.probs):
                    if x <= 0:
                        raise ReferenceNotPositive(
                            f"reference Q_{i + 1} assigns zero probability to symbol {s!r}"
                        )
            pmfs.append(marginal.probs)
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "per_dimension", tuple(pmfs))

    @classmethod
    def homogeneous(cls, q: Mapping, k: int, **kwargs) -> ReferenceSpec:
        """The same single-variable PMF ``q`` (symbol -> prob) on all k axes."""
        alphabet, probs = _sorted_mapping(q)
        return cls((alphabet,) * k, (probs,) * k, **kwargs)

    @classmethod
    def from_mappings(cls, qs: Sequence[Mapping], **kwargs) -> ReferenceSpec:
        pairs = [_sorted_mapping(q) for q in qs]
        return cls(tuple(a for a, _ in pairs), tuple(p for _, p in pairs), **kwargs)

    @property
    def k(self) -> int:
        return len(self.alphabets)

    @property
    def homogeneous_flag(self) -> bool:
        first_a, first_q = self.alphabets[0], self.per_dimension[0]
        return all(
            a == first_a and q.dtype == first_q.dtype and bool(np.all(q == first_q))
            for a, q in zip(self.alphabets, self.per_dimension)
        )

    @property
    def is_rational(self) -> bool:
        return all(q.dtype == object for q in self.per_dimension)

    @cached_property
    def float_per_dimension(self) -> tuple[np.ndarray, ...]:
        return tuple(_to_float(q) for q in self.per_dimension)

    def check_alphabets(self, alphabets: Sequence[Alphabet]) -> None:
        alphabets = tuple(alphabets)
        if len(alphabets) != self.k:
            raise AlphabetMismatch(f"reference has {self.k} dimensions, distribution has {len(alphabets)}")
        for i, (a, b) in enumerate(zip(self.alphabets, alphabets)):
            if a != b:
                raise AlphabetMismatch(
                    f"dimension {i + 1}: reference alphabet {list(a)} != distribution alphabet {list(b)}"
                )


def _sorted_mapping(q: Mapping):
    items = sorted((str(s), p) for s, p in q.items())
    alphabet = Alphabet(tuple(s for s, _ in items))
    values = [p for _, p in items]
    if all(isinstance(p, (Fraction, int)) and not isinstance(p, bool) for p in values):
        arr = np.empty(len(values), dtype=object)
        arr[:] = [Fraction(p) for p in values]
    else:
        arr = np.array(values, dtype=np.float64)
    return alphabet, arr


def product_reference_pmf(ref: ReferenceSpec, alphabets: Sequence | None = None) -> JointPmf:
    """Joint PMF of the product reference, prod_i Q_i(x_i).

    If ``alphabets`` is given it must match the reference dimension by
    dimension.
    """
    if alphabets is not None:
        ref.check_alphabets(_coerce_alphabets(alphabets))
    if ref.is_rational:
        factors = ref.per_dimension
    else:
        factors = ref.float_per_dimension
    probs = reduce(np.multiply.outer, factors)
    mode = RATIONAL if ref.is_rational else FLOAT64
    # zero reference entries are permitted only under allow_zero; the
    # product is still a valid PMF
    return JointPmf(ref.alphabets, probs, mode, ref.tolerance)


# --- JSON -------------------------------------------------------------------

def _fraction_pair(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def joint_to_json(p: JointPmf) -> dict:
    doc = {
        "k": p.k,
        "alphabets": [list(a) for a in p.alphabets],
        "probs": [float(x) for x in p.float_probs.ravel()],
        "mode": p.mode,
    }
    if p.is_rational:
        doc["rational_probs"] = [_fraction_pair(x) for x in p.probs.ravel()]
    return doc


def _sort_tensor(alphabets_raw, flat, mode):
    """Reorder a flat row-major tensor so every axis follows sorted symbols."""
    raw = [[str(s) for s in a] for a in alphabets_raw]
    shape = tuple(len(a) for a in raw)
    arr = np.empty(len(flat), dtype=object if mode == RATIONAL else np.float64)
    arr[:] = flat
    if arr.size != math.prod(shape):
        raise InvalidDistribution(f"tensor has {arr.size} entries, alphabets require {math.prod(shape)}")
    arr = arr.reshape(shape)
    for axis, syms in enumerate(raw):
        if len(set(syms)) != len(syms):
            raise InvalidDistribution(f"duplicate symbols in alphabet {syms}")
        order = sorted(range(len(syms)), key=syms.__getitem__)
        arr = np.take(arr, order, axis=axis)
    return raw, arr


def joint_from_json(doc: Mapping, tolerance: float = DEFAULT_TOLERANCE) -> JointPmf:
    try:
        alphabets_raw = doc["alphabets"]
        mode = doc.get("mode", FLOAT64)
        if mode not in MODES:
            raise InputFormatError(f"unknown mode {mode!r}")
        if mode == RATIONAL:
            if "rational_probs" in doc:
                flat = [_as_fraction(x) for x in doc["rational_probs"]]
            else:
                flat = [_as_fraction(x) for x in doc["probs"]]
        else:
            flat = [float(x) for x in doc["probs"]]
        if "k" in doc and int(doc["k"]) != len(alphabets_raw):
            raise InputFormatError(f"k={doc['k']} but {len(alphabets_raw)} alphabets given")
    except KLDecompError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputFormatError(f"malformed distribution document: {exc!r}") from exc
    raw, arr = _sort_tensor(alphabets_raw, flat, mode)
    return JointPmf(tuple(Alphabet(tuple(a)) for a in raw), arr, mode, tolerance)


def reference_to_json(ref: ReferenceSpec) -> dict:
    doc = {
        "k": ref.k,
        "homogeneous": ref.homogeneous_flag,
        "alphabets": [list(a) for a in ref.alphabets],
        "probs": [[float(x) for x in q] for q in ref.float_per_dimension],
    }
    if ref.is_rational:
        doc["rational_probs"] = [[_fraction_pair(x) for x in q] for q in ref.per_dimension]
    return doc


def reference_from_json(
    doc: Mapping,
    k: int | None = None,
    *,
    allow_zero: bool = False,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ReferenceSpec:
    """Read a reference document.

    Two layouts are accepted: the full per-dimension layout written by
    :func:`reference_to_json`, and the shorthand ``{"Q": {sym: p}, "k": n}``
    for a homogeneous reference (``k`` may come from the caller instead).
    """
    kwargs = dict(allow_zero=allow_zero, tolerance=tolerance)
    try:
        if "Q" in doc:
            n = int(doc.get("k", k if k is not None else 0))
            if n < 1:
                raise InputFormatError("homogeneous reference needs a dimension count k")
            q = {s: (_as_fraction(p) if isinstance(p, list) else p) for s, p in doc["Q"].items()}
            return ReferenceSpec.homogeneous(q, n, **kwargs)
        alphabets_raw = doc["alphabets"]
        if "rational_probs" in doc:
            rows = [[_as_fraction(x) for x in row] for row in doc["rational_probs"]]
        else:
            rows = [[float(x) for x in row] for row in doc["probs"]]
        if len(rows) != len(alphabets_raw):
            raise InputFormatError(f"{len(alphabets_raw)} alphabets but {len(rows)} probability rows")
        qs = []
        for syms, row in zip(alphabets_raw, rows):
            if len(syms) != len(row):
                raise AlphabetMismatch(f"alphabet {syms} has {len(syms)} symbols but {len(row)} probabilities")
            qs.append(dict(zip(syms, row)))
    except KLDecompError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise InputFormatError(f"malformed reference document: {exc!r}") from exc
    ref = ReferenceSpec.from_mappings(qs, **kwargs)
    if k is not None and ref.k != k:
        raise AlphabetMismatch(f"reference has {ref.k} dimensions, expected {k}")
    return ref
