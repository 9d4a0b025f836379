import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_joint(rng, sizes, sparsity=0.0):
    """Dirichlet-distributed float joint; optionally zero out some cells."""
    from kldecomp import Alphabet, JointPmf

    n = int(np.prod(sizes))
    p = rng.dirichlet(np.full(n, 0.7))
    if sparsity:
        p[rng.random(n) < sparsity] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
        p /= p.sum()
    alphabets = [Alphabet(tuple(f"s{j}" for j in range(m))) for m in sizes]
    return JointPmf(alphabets, p.reshape(sizes))


def random_reference(rng, joint, floor=1e-3):
    from kldecomp import ReferenceSpec

    qs = []
    for a in joint.alphabets:
        q = rng.dirichlet(np.ones(len(a))) + floor
        qs.append(q / q.sum())
    return ReferenceSpec(joint.alphabets, tuple(qs))


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
