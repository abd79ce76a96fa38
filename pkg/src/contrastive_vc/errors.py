"""Exception hierarchy.

Every error raised by the package derives from :class:`ContrastiveError`, which
is itself a ``ValueError`` so that callers validating user input can catch the
usual builtin.
"""


class ContrastiveError(ValueError):
    pass


class ValidationError(ContrastiveError):
    """Malformed query set, label vector, model or file."""


class TieError(ContrastiveError):
    """Two compared distances are equal (or within tolerance) under a model
    that is not a class partition."""


class MalformedSystem(ContrastiveError):
    pass


class CapExceeded(ContrastiveError):
    pass


class BranchCapExceeded(CapExceeded):
    pass


class UnsupportedCombination(ContrastiveError):
    pass


class UnsupportedClass(ContrastiveError):
    pass


class DimensionError(ContrastiveError):
    pass


class DomainError(ContrastiveError):
    pass


class AbortedOnUnknown(ContrastiveError):
    pass


class KinkDetected(ContrastiveError):
    """The hinge of the margin-triplet loss switches within the finite
    difference stencil."""


class SeparationRejectionLimit(ContrastiveError):
    pass
