"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for invalid input, 3 for search/size limits, 4 for simulation failures.
"""


class LatfadeError(Exception):
    exit_code = 2


class ValidationError(LatfadeError, ValueError):
    exit_code = 2


class RankDeficient(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonPositiveScale(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class UnsupportedGroup(ValidationError):
    pass


class BadConductor(ValidationError):
    pass


class NotTotallyComplex(ValidationError):
    pass


class InconsistentDiscriminant(ValidationError):
    pass


class NormMismatch(ValidationError):
    pass


class InvalidTrials(ValidationError):
    pass


class BlockMismatch(ValidationError):
    pass


class EmptyCode(ValidationError):
    pass


class SearchError(LatfadeError):
    exit_code = 3


class Overflow(SearchError):
    """Enumeration would produce more points than allowed."""


class EmptySearch(SearchError):
    """No nonzero lattice point inside the search radius."""


class NonIntegerNorm(SearchError):
    """An algebraic norm failed the integrality gate."""


class SimulationError(LatfadeError):
    exit_code = 4


class UncertifiedInvariant(SimulationError):
    """A rate threshold was requested from an invariant that is only an upper bound."""
