"""Exception hierarchy for the co-allocation solver."""


class CoallocError(Exception):
    """Base class for every error raised by this package."""


class ProfileError(CoallocError, ValueError):
    """A slowdown profile is unreadable or violates its invariants."""


class TaskSetError(CoallocError, ValueError):
    """A task set is invalid or references an unknown profile."""


class DocumentError(CoallocError, ValueError):
    """A JSON document is malformed or does not match its schema."""


class StructuralError(CoallocError, ValueError):
    """A solution names tasks or cores that do not exist in the instance."""


class MalformedSolutionError(CoallocError, ValueError):
    """A solver assignment file cannot be parsed into binary values."""


class OracleGuardError(CoallocError):
    """The instance exceeds the exhaustive oracle's search-space guard."""


class GeneratorError(CoallocError, ValueError):
    """A generation request cannot be satisfied."""


class SolveTimeout(CoallocError):
    """A solver ran past its deadline."""
