"""Exception hierarchy shared by all ghnet modules."""


class GHNetError(ValueError):
    """Base class for every error raised by ghnet."""


class MalformedInputError(GHNetError):
    """Input data has the wrong shape, non-finite entries, or does not parse."""


class MetricAxiomError(GHNetError):
    """A distance matrix violates the metric axioms beyond tolerance."""


class DimensionError(GHNetError):
    """Sizes or ambient dimensions of the operands disagree."""


class EmptyRelationError(GHNetError):
    """An operation would produce a relation with no pairs."""


class NotACorrespondenceError(GHNetError):
    """A relation fails surjectivity onto one of its factors."""


class PreconditionError(GHNetError):
    """A documented precondition of an operation does not hold."""


class SizeLimitError(GHNetError):
    """Instance is too large for an exhaustive method."""


class UnsupportedDimensionError(GHNetError):
    """Operation is only implemented for a particular ambient dimension."""


class TheoremViolation(RuntimeError):
    """An inequality that must hold by theorem failed on a computed instance."""

    def __init__(self, message, reproducer_path=None):
        super().__init__(message)
        self.reproducer_path = reproducer_path
