"""KL divergence against a product reference and its exact decomposition.

    KL(P_k || Q_1 x ... x Q_k) = sum_i KL(P_i || Q_i) + C(P_k)
                               = sum_i KL(P_i || Q_i) + sum_{r>=2} I^(r)

Both sides are computed independently: the left by a direct pass over the
joint tensor, the right from single-variable marginals and the lattice of
subset entropies.  The gap between them is reported as a residual.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .dist import JointPmf, ReferenceSpec, marginalize, psum
from .errors import AbsoluteContinuityViolated, InputFormatError, KLDecompError, ReferenceNotPositive
from .lattice import (
    EntropyTable,
    InteractionTable,
    entropy_table,
    interaction_table_fast,
    total_correlation_entropy,
    total_interaction_by_order,
)

DEFAULT_RESIDUAL_TOLERANCE = 1e-12


def _float_vector(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype == object:
        arr = np.array([float(v) for v in arr.ravel()], dtype=np.float64)
    return np.asarray(arr, dtype=np.float64).ravel()


def kl_divergence(p, q, *, strict: bool = True, symbols: Sequence | None = None) -> float:
    """KL(p || q) in bits for two probability vectors of equal length.

    With ``strict`` (the default) any zero in ``q`` is an error.  Otherwise
    zeros in ``q`` are tolerated where ``p`` is also zero.
    """
    p = _float_vector(p)
    q = _float_vector(q)
    if p.shape != q.shape:
        raise InputFormatError(f"length mismatch: p has {p.size} entries, q has {q.size}")
    label = (lambda i: repr(symbols[i])) if symbols is not None else (lambda i: f"#{i}")
    zero_q = q <= 0
    if strict and zero_q.any():
        i = int(np.flatnonzero(zero_q)[0])
        raise ReferenceNotPositive(f"reference assigns zero probability to symbol {label(i)}")
    support = p > 0
    bad = support & zero_q
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise AbsoluteContinuityViolated(
            f"P({label(i)}) = {p[i]!r} > 0 but the reference assigns it zero probability"
        )
    ps, qs = p[support], q[support]
    return psum(ps * np.log2(ps / qs))


def kl_joint_vs_product(joint: JointPmf, ref: ReferenceSpec) -> float:
    """Direct KL(P_k || prod_i Q_i) from the full joint tensor.

    Each outcome contributes P(x) * (log2 P(x) - sum_i log2 Q_i(x_i)); the
    product reference itself is never formed, so it cannot underflow.
    """
    ref.check_alphabets(joint.alphabets)
    k = joint.k
    log_q = np.zeros(joint.shape, dtype=np.float64)
    with np.errstate(divide="ignore"):
        for i, q in enumerate(ref.float_per_dimension):
            shape = [1] * k
            shape[i] = len(q)
            log_q = log_q + np.log2(q).reshape(shape)
    p = joint.float_probs
    support = p > 0
    bad = support & np.isneginf(log_q)
    if bad.any():
        idx = tuple(int(j) for j in np.argwhere(bad)[0])
        outcome = tuple(a.symbols[j] for a, j in zip(joint.alphabets, idx))
        raise AbsoluteContinuityViolated(
            f"outcome {outcome} has positive probability but zero reference probability"
        )
    ps = p[support]
    return psum(ps * (np.log2(ps) - log_q[support]))


def marginal_kls(joint: JointPmf, ref: ReferenceSpec) -> np.ndarray:
    """KL(P_i || Q_i) for each axis i.

    Marginals of rational joints are summed exactly and converted to float
    afterwards, so a marginal that equals its reference gives exactly 0.
    """
    ref.check_alphabets(joint.alphabets)
    out = np.empty(joint.k, dtype=np.float64)
    for i in range(joint.k):
        m = marginalize(joint, [i])
        out[i] = kl_divergence(
            m.float_probs, ref.float_per_dimension[i],
            strict=not ref.allow_zero, symbols=ref.alphabets[i].symbols,
        )
    return out


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    """All quantities of the decomposition, in bits.

    ``interaction_totals[j]`` is the (j+2)-way total I^(j+2).
    """

    k: int
    kl_full: float
    marginal_kls: tuple[float, ...]
    marginal_kl_sum: float
    interaction_totals: tuple[float, ...]
    total_correlation_interactions: float
    total_correlation_entropy: float
    recomposed_kl: float
    residual_decomposition: float
    residual_lemma: float
    entropies: EntropyTable | None = field(default=None, repr=False)
    per_subset_interactions: InteractionTable | None = field(default=None, repr=False)

    @property
    def by_order(self) -> dict[int, float]:
        return {r: v for r, v in enumerate(self.interaction_totals, start=2)}

    def to_dict(self) -> dict:
        doc = {
            "k": self.k,
            "KL_full": self.kl_full,
            "KL_marginals": list(self.marginal_kls),
            "KL_marginals_sum": self.marginal_kl_sum,
            "TotalCorrelation_C_Pk": self.total_correlation_interactions,
            "Direct_C_Pk": self.total_correlation_entropy,
            "Recomposed_KL": self.recomposed_kl,
            "Residual": self.residual_decomposition,
            "Residual_Lemma": self.residual_lemma,
            "I_sums": {str(r): v for r, v in self.by_order.items()},
        }
        if self.entropies is not None:
            doc["entropy_table"] = self.entropies.to_json()
        if self.per_subset_interactions is not None:
            doc["interaction_table"] = self.per_subset_interactions.to_json()
        return doc

    @classmethod
    def from_dict(cls, doc) -> DecompositionReport:
        try:
            k = int(doc["k"])
            sums = {int(r): float(v) for r, v in doc["I_sums"].items()}
            if sorted(sums) != list(range(2, k + 1)):
                raise InputFormatError(f"I_sums must cover orders 2..{k}, got {sorted(sums)}")
            return cls(
                k=k,
                kl_full=float(doc["KL_full"]),
                marginal_kls=tuple(float(v) for v in doc.get("KL_marginals", ())),
                marginal_kl_sum=float(doc["KL_marginals_sum"]),
                interaction_totals=tuple(sums[r] for r in range(2, k + 1)),
                total_correlation_interactions=float(doc["TotalCorrelation_C_Pk"]),
                total_correlation_entropy=float(doc["Direct_C_Pk"]),
                recomposed_kl=float(doc.get("Recomposed_KL", float("nan"))),
                residual_decomposition=float(doc["Residual"]),
                residual_lemma=float(doc.get("Residual_Lemma", float("nan"))),
                entropies=EntropyTable.from_json(doc["entropy_table"]) if "entropy_table" in doc else None,
                per_subset_interactions=(
                    InteractionTable.from_json(doc["interaction_table"]) if "interaction_table" in doc else None
                ),
            )
        except KLDecompError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputFormatError(f"malformed report: {exc!r}") from exc

    def plot_rows(self) -> list[tuple[str, float]]:
        """Stacked-bar components followed by the directly computed total."""
        rows = [("marginal_sum", self.marginal_kl_sum)]
        rows += [(f"I^({r})", v) for r, v in self.by_order.items()]
        rows.append(("kl_full", self.kl_full))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["component", "value_bits"])
        for name, value in self.plot_rows():
            writer.writerow([name, repr(value)])
        return buf.getvalue()


def decompose(joint: JointPmf, ref: ReferenceSpec, *, include_tables: bool = False) -> DecompositionReport:
    """Direct KL against the product reference and its marginal/interaction split.

    ``ref`` may be homogeneous or heterogeneous; the dependency part C(P_k)
    does not involve the reference at all.
    """
    ref.check_alphabets(joint.alphabets)
    h = entropy_table(joint)
    t = interaction_table_fast(h)
    orders = total_interaction_by_order(t)
    tc_interactions = psum(orders[2:])
    tc_entropy = total_correlation_entropy(h)
    kl_full = kl_joint_vs_product(joint, ref)
    mkl = marginal_kls(joint, ref)
    mkl_sum = psum(mkl)
    recomposed = mkl_sum + tc_interactions
    return DecompositionReport(
        k=joint.k,
        kl_full=kl_full,
        marginal_kls=tuple(float(v) for v in mkl),
        marginal_kl_sum=mkl_sum,
        interaction_totals=tuple(float(v) for v in orders[2:]),
        total_correlation_interactions=tc_interactions,
        total_correlation_entropy=tc_entropy,
        recomposed_kl=recomposed,
        residual_decomposition=abs(kl_full - recomposed),
        residual_lemma=abs(tc_entropy - tc_interactions),
        entropies=h if include_tables else None,
        per_subset_interactions=t if include_tables else None,
    )


def check_lemma_identity(joint: JointPmf) -> float:
    """|C from entropies - C from interaction totals|."""
    h = entropy_table(joint)
    t = interaction_table_fast(h)
    return abs(total_correlation_entropy(h) - psum(total_interaction_by_order(t)[2:]))
