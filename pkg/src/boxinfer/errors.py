"""Exception types shared across the package."""

from __future__ import annotations


class InferenceError(Exception):
    """Base class for all errors raised by this package."""


class SceneFormatError(InferenceError):
    """Scene document is structurally malformed (bad JSON, wrong types, missing fields)."""


class SceneValidationError(InferenceError):
    """Scene document parsed but violates semantic invariants.

    Carries the full violation list so callers see every problem at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid scene: {lines}")


class HypothesisCapError(InferenceError):
    """Hypothesis space larger than the configured enumeration cap."""


class EmptyHypothesisSpaceError(InferenceError):
    """No valid placements exist (more boxes than objects in surjective mode)."""


class InternalConsistencyError(InferenceError):
    """A computed table is missing an entry it was required to cover."""


class OraclePreconditionError(InferenceError):
    """Oracle invoked outside its supported regime (nonzero stds, too large a scene)."""


class RatingsFormatError(InferenceError):
    """Human ratings table is malformed or violates its invariants in strict mode."""


class UndefinedCorrelationError(InferenceError):
    """Pearson correlation undefined (fewer than two points or zero variance)."""


class EvalDataError(InferenceError):
    """Evaluation inputs cannot be paired (no overlapping scenarios, too few participants)."""
