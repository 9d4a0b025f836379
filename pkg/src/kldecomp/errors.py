"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command-line
frontend never has to pattern-match on exception types.
"""


class KLDecompError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputFormatError(KLDecompError, ValueError):
    """Malformed JSON or a document missing required fields."""

    exit_code = 2


class InvariantViolation(KLDecompError, ValueError):
    """A domain invariant does not hold (normalization, sign, shape...)."""

    exit_code = 3


class InvalidDistribution(InvariantViolation):
    pass


class InvalidSubset(InvariantViolation):
    pass


class AlphabetMismatch(InvariantViolation):
    pass


class InvalidPopulation(InvariantViolation):
    pass


class UnknownSymbol(InvariantViolation, KeyError):
    def __str__(self):
        # KeyError wraps its message in quotes
        return Exception.__str__(self)


class ArityMismatch(InvariantViolation):
    pass


class DivergenceUndefined(KLDecompError, ValueError):
    """The KL divergence is not defined for the given pair."""

    exit_code = 4


class ReferenceNotPositive(DivergenceUndefined):
    pass


class AbsoluteContinuityViolated(DivergenceUndefined):
    pass


class DimensionCapExceeded(KLDecompError, ValueError):
    exit_code = 5
