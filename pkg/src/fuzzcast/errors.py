"""Exception types shared across the package.

Every error raised by the library carries a short machine-readable ``code``
so that the HTTP service and the CLI can map failures to structured error
payloads and exit codes without string matching.
"""

from __future__ import annotations


class FuzzcastError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ModeViolationError(FuzzcastError):
    """An operation for one sampling model was applied to data from the other.

    Examples: feeding a multi-species observation to a multinomial
    accumulator, or asking for an incidence snapshot of abundance data.
    """

    code = "mode_violation"


class UndefinedEstimateError(FuzzcastError):
    """The requested estimate is not defined for the given data.

    Raised for empty streams (n == 0, V == 0) and for estimators whose
    preconditions on n are not met.
    """

    code = "undefined_estimate"


class EffortError(FuzzcastError):
    """Base class for failures of the required-effort computations."""

    code = "effort"


class TargetAlreadyReachedError(EffortError):
    """The coverage target does not exceed the current estimated coverage."""

    code = "already_achieved"


class TargetUnreachableError(EffortError):
    """The coverage target is >= 1 and can never be certified from data."""

    code = "unreachable_target"


class InsufficientRareSpeciesError(EffortError):
    """f1 == 0 or f2 == 0 (Q1 == 0 or Q2 == 0), so the effort formulas degenerate."""

    code = "insufficient_rare_species"


class FormulaRangeError(EffortError):
    """The closed-form incidence effort formula is undefined for this target.

    The log argument left its valid range (0, 1].  The exact inversion of the
    extrapolation curve may still be defined; when it is, the computed value
    is attached as ``m_exact``.
    """

    code = "formula_range"

    def __init__(self, message: str, m_exact: int | None = None):
        super().__init__(message)
        self.m_exact = m_exact


class ParseError(FuzzcastError):
    """An input file could not be parsed.  Carries a 1-based line number."""

    code = "parse"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(ParseError):
    """A snapshot CSV is structurally invalid (missing or malformed columns)."""

    code = "schema"


class MonotonicityError(ParseError):
    """Snapshot rows went backwards in time or in the number of inputs."""

    code = "monotonicity"


class InsufficientReplicationError(FuzzcastError):
    """An evaluation needs at least two campaign runs."""

    code = "insufficient_replication"
