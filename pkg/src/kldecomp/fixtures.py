"""Shipped validation cases: hypergeometric populations and published values.

Expected values are stored as the exact decimal strings that were
published and parsed on use, so nothing is retyped as a float literal.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .decomp import DecompositionReport, decompose
from .hypergeom import PopulationSpec, joint_from_population, reference_from_population

VALUE_TOLERANCE = 1e-13
RESIDUAL_TOLERANCE = 1e-12

# near-zero fields compared at the residual tolerance
RESIDUAL_FIELDS = frozenset({"KL_marginals_sum", "Residual"})


@dataclass(frozen=True)
class CaseFixture:
    name: str
    population: PopulationSpec
    expected: dict[str, str] = field(repr=False)

    def expected_values(self) -> dict[str, float]:
        return {key: float(text) for key, text in self.expected.items()}


CASES = (
    CaseFixture(
        "Case1_k3_Symm",
        PopulationSpec({"0": 2, "1": 2, "2": 2}, 3),
        {
            "KL_full": "0.24799690655495005",
            "KL_marginals_sum": "0.000000e+00",
            "TotalCorrelation_C_Pk": "0.24799690655495005",
            "Direct_C_Pk": "0.24799690655495027",
            "Residual": "1.665335e-16",
            "I_sums.2": "0.18910321749875303",
            "I_sums.3": "0.05889368905619702",
        },
    ),
    CaseFixture(
        "Case2_k2_Asymm",
        PopulationSpec({"0": 3, "1": 2}, 2),
        {
            "KL_full": "0.04643934467101547",
            "KL_marginals_sum": "0.000000e+00",
            "TotalCorrelation_C_Pk": "0.04643934467101547",
            "Direct_C_Pk": "0.04643934467101547",
            "Residual": "6.938894e-17",
            "I_sums.2": "0.04643934467101547",
        },
    ),
    CaseFixture(
        "Case4_k4_Symm",
        PopulationSpec({"A": 4, "B": 4}, 4),
        {
            "KL_full": "0.11441198342591395",
            "KL_marginals_sum": "6.406853e-16",
            "TotalCorrelation_C_Pk": "0.1144119834259133",
            "Direct_C_Pk": "0.11441198342591374",
            "Residual": "5.689893e-16",
            "I_sums.2": "0.08863118375487466",
            "I_sums.3": "-0.02188937283553888",
            "I_sums.4": "0.003891426907205896",
        },
    ),
)


def case_by_name(name: str) -> CaseFixture:
    for case in CASES:
        if case.name == name:
            return case
    raise KeyError(name)


def report_fields(report: DecompositionReport) -> dict[str, float]:
    """Flatten a report into the fixture field names."""
    doc = report.to_dict()
    out = {key: doc[key] for key in ("KL_full", "KL_marginals_sum", "TotalCorrelation_C_Pk", "Direct_C_Pk", "Residual")}
    out.update({f"I_sums.{r}": v for r, v in doc["I_sums"].items()})
    return out


@dataclass(frozen=True)
class FieldCheck:
    field: str
    expected: float
    actual: float
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.actual - self.expected)

    @property
    def ok(self) -> bool:
        return self.difference <= self.tolerance


@dataclass(frozen=True)
class CaseResult:
    name: str
    checks: tuple[FieldCheck, ...]
    report: DecompositionReport = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[FieldCheck]:
        return [c for c in self.checks if not c.ok]


def run_case(
    case: CaseFixture,
    value_tolerance: float = VALUE_TOLERANCE,
    residual_tolerance: float = RESIDUAL_TOLERANCE,
) -> CaseResult:
    joint = joint_from_population(case.population)
    report = decompose(joint, reference_from_population(case.population))
    actual = report_fields(report)
    checks = []
    for key, expected in case.expected_values().items():
        tol = residual_tolerance if key in RESIDUAL_FIELDS else value_tolerance
        checks.append(FieldCheck(key, expected, actual.get(key, float("nan")), tol))
    return CaseResult(case.name, tuple(checks), report)


def validate_cases(cases=CASES, **tolerances) -> list[CaseResult]:
    return [run_case(c, **tolerances) for c in cases]
