"""Exact decomposition of KL(P_k || Q_1 x ... x Q_k) into marginal
divergences and r-way interaction information."""
from .decomp import (
    DecompositionReport,
    check_lemma_identity,
    decompose,
    kl_divergence,
    kl_joint_vs_product,
    marginal_kls,
)
from .dist import (
    Alphabet,
    JointPmf,
    MarginalPmf,
    ReferenceSpec,
    marginalize,
    product_reference_pmf,
    validate_pmf,
)
from .errors import *  # noqa: F401,F403
from .hypergeom import (
    PopulationSpec,
    joint_from_population,
    reference_from_population,
    sequence_probability,
)
from .lattice import (
    EntropyTable,
    InteractionTable,
    entropy_table,
    interaction_table_fast,
    interaction_table_naive,
    mobius_roundtrip_check,
    total_correlation_entropy,
    total_correlation_interactions,
    total_interaction_by_order,
)
from .subsets import SubsetMask

__version__ = "0.1.0"
