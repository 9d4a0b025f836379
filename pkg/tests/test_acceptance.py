"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or as a script with
``python tests/test_acceptance.py``.
"""
import itertools
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_joint, random_reference  # noqa: E402
from kldecomp import (  # noqa: E402
    EntropyTable,
    JointPmf,
    Alphabet,
    PopulationSpec,
    ReferenceSpec,
    decompose,
    entropy_table,
    interaction_table_fast,
    interaction_table_naive,
    joint_from_population,
    marginalize,
    mobius_roundtrip_check,
    reference_from_population,
)
from kldecomp.fixtures import case_by_name  # noqa: E402
from oracles import mutual_information_2d  # noqa: E402

VALUE_TOL = 1e-13
RESIDUAL_TOL = 1e-12
SEED = 20241016


class Outcome:
    def __init__(self, name):
        self.name = name
        self.checks = []

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        bad = [f"{label} ({detail})" for label, ok, detail in self.checks if not ok]
        return f"[{status}] {self.name}" + (": " + "; ".join(bad) if bad else "")


def _close(out, label, actual, expected, tol):
    diff = abs(actual - expected)
    out.check(label, diff <= tol, f"got {actual!r}, expected {expected!r}, |diff|={diff:.2e} > {tol:g}")


def _paper_case(name, population, fields):
    out = Outcome(name)
    start = time.perf_counter()
    report = decompose(joint_from_population(population), reference_from_population(population))
    elapsed = time.perf_counter() - start
    expected = case_by_name(name.split(" ")[0]).expected_values()
    actual = {"KL_full": report.kl_full}
    actual.update({f"I_sums.{r}": v for r, v in report.by_order.items()})
    for f in fields:
        _close(out, f, actual[f], expected[f], VALUE_TOL)
    out.check("residual", report.residual_decomposition <= RESIDUAL_TOL, f"{report.residual_decomposition:.2e}")
    out.check("runtime < 1 s", elapsed < 1.0, f"{elapsed:.3f} s")
    return out, report


def criterion_1():
    out, _ = _paper_case("Case1_k3_Symm (criterion 1)", PopulationSpec({"0": 2, "1": 2, "2": 2}, 3),
                         ["KL_full", "I_sums.2", "I_sums.3"])
    return out


def criterion_2():
    out, report = _paper_case("Case2_k2_Asymm (criterion 2)", PopulationSpec({"0": 3, "1": 2}, 2),
                              ["KL_full", "I_sums.2"])
    _close(out, "KL_full = I^(2)", report.kl_full, report.interaction_totals[0], VALUE_TOL)
    out.check("marginal KL sum <= 1e-15", report.marginal_kl_sum <= 1e-15, f"{report.marginal_kl_sum:.2e}")
    return out


def criterion_3():
    out, _ = _paper_case("Case4_k4_Symm (criterion 3)", PopulationSpec({"A": 4, "B": 4}, 4),
                         ["KL_full", "I_sums.2", "I_sums.3", "I_sums.4"])
    return out


def _random_instances(n=1000):
    rng = np.random.default_rng(SEED)
    for _ in range(n):
        k = int(rng.integers(2, 7))
        sizes = tuple(int(s) for s in rng.integers(2, 5, size=k))
        joint = random_joint(rng, sizes, sparsity=float(rng.choice([0.0, 0.2])))
        yield joint, random_reference(rng, joint)


_RANDOM_REPORTS = []


def _random_reports():
    if not _RANDOM_REPORTS:
        start = time.perf_counter()
        for joint, ref in _random_instances():
            _RANDOM_REPORTS.append(decompose(joint, ref))
        _RANDOM_REPORTS.append(time.perf_counter() - start)
    return _RANDOM_REPORTS[:-1], _RANDOM_REPORTS[-1]


def criterion_4():
    out = Outcome("Theorem residual on 1000 random instances (criterion 4)")
    reports, elapsed = _random_reports()
    worst = max(r.residual_decomposition for r in reports)
    out.check("instances >= 1000", len(reports) >= 1000, str(len(reports)))
    out.check("max residual <= 1e-12", worst <= RESIDUAL_TOL, f"{worst:.2e}")
    out.check("runtime < 60 s", elapsed < 60, f"{elapsed:.1f} s")
    return out


def criterion_5():
    out = Outcome("Total correlation identity on the same instances (criterion 5)")
    reports, _ = _random_reports()
    worst = max(r.residual_lemma for r in reports)
    out.check("max |C_entropy - C_interactions| <= 1e-12", worst <= RESIDUAL_TOL, f"{worst:.2e}")
    return out


def criterion_6():
    out = Outcome("Fast transform vs literal double sum, zeta round trip (criterion 6)")
    rng = np.random.default_rng(SEED)
    worst_fast, worst_trip = 0.0, 0.0
    for k in range(1, 11):
        for _ in range(3):
            h = EntropyTable(k, np.concatenate([[0.0], rng.uniform(0, 2 * k, (1 << k) - 1)]))
            diff = np.max(np.abs(interaction_table_fast(h).values - interaction_table_naive(h).values))
            worst_fast = max(worst_fast, float(diff))
            worst_trip = max(worst_trip, mobius_roundtrip_check(h))
    out.check("fast == naive within 1e-12", worst_fast <= RESIDUAL_TOL, f"{worst_fast:.2e}")
    out.check("round trip within 1e-12", worst_trip <= RESIDUAL_TOL, f"{worst_trip:.2e}")
    return out


def criterion_7():
    out = Outcome("k=2 reduction to mutual information (criterion 7)")
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        sizes = tuple(int(s) for s in rng.integers(2, 5, size=2))
        joint = random_joint(rng, sizes, sparsity=0.2)
        own = ReferenceSpec(joint.alphabets, tuple(marginalize(joint, [i]).probs for i in range(2)), allow_zero=True)
        report = decompose(joint, own)
        mi = float(mutual_information_2d(joint.probs.tolist()))
        worst = max(worst, abs(report.kl_full - mi))
    out.check("|KL_full - MI| <= 1e-12", worst <= RESIDUAL_TOL, f"{worst:.2e}")
    return out


def criterion_8():
    out = Outcome("Sign conventions and synergy witness (criterion 8)")
    rng = np.random.default_rng(SEED)
    singles_exact, worst_pair = True, 0.0
    for _ in range(100):
        k = int(rng.integers(2, 6))
        joint = random_joint(rng, tuple(int(s) for s in rng.integers(2, 5, size=k)), sparsity=0.2)
        h = entropy_table(joint)
        t = interaction_table_fast(h)
        singles_exact &= all(t[1 << i] == -h[1 << i] for i in range(k))
        pairs = [t[(1 << i) | (1 << j)] for i in range(k) for j in range(i + 1, k)]
        worst_pair = min(worst_pair, min(pairs))
    out.check("I({i}) == -H(X_i) exactly", singles_exact)
    out.check("pairwise I >= -1e-12", worst_pair >= -RESIDUAL_TOL, f"min {worst_pair:.2e}")
    b = Alphabet(("0", "1"))
    p = np.zeros((2, 2, 2))
    for x, y in itertools.product(range(2), repeat=2):
        p[x, y, x ^ y] = 0.25
    xor_triple = interaction_table_fast(entropy_table(JointPmf((b,) * 3, p)))[0b111]
    out.check("XOR triple interaction < 0", xor_triple < 0, f"got {xor_triple!r}")
    return out


def criterion_9():
    out = Outcome("Hypergeometric exactness and exchangeability (criterion 9)")
    shipped = [PopulationSpec({"0": 2, "1": 2, "2": 2}, 3), PopulationSpec({"0": 3, "1": 2}, 2),
               PopulationSpec({"A": 4, "B": 4}, 4)]
    extra = [PopulationSpec({"a": 1, "b": 2, "c": 3}, 4), PopulationSpec({"x": 2, "y": 1}, 3)]
    for spec in shipped:
        joint = joint_from_population(spec)
        props = [Fraction(spec.counts[s], spec.n) for s in joint.alphabets[0]]
        exact = all(list(marginalize(joint, [i]).probs) == props for i in range(spec.k))
        out.check(f"marginals exact for {dict(spec.counts)}", exact)
    for spec in shipped + extra:
        joint = joint_from_population(spec)
        exch = all(
            joint.probs[perm] == joint.probs[idx]
            for idx in itertools.product(range(joint.shape[0]), repeat=spec.k)
            for perm in itertools.permutations(idx)
        )
        out.check(f"exchangeable for {dict(spec.counts)}, k={spec.k}", exch)
    return out


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(criterion, capsys):
    out = criterion()
    with capsys.disabled():
        print("\n" + out.line())
    assert out.passed, out.line()


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    for o in outcomes:
        print(o.line())
    sys.exit(0 if all(o.passed for o in outcomes) else 1)
