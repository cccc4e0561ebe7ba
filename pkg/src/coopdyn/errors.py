"""Exception hierarchy for coopdyn."""


class CoopDynError(Exception):
    """Base class for every error raised by this package."""


class InvalidStateError(CoopDynError, ValueError):
    pass


class InvalidIndexError(CoopDynError, IndexError):
    pass


class InvalidRankError(CoopDynError, IndexError):
    pass


class SpaceTooLargeError(CoopDynError, ValueError):
    pass


class UnsupportedSpaceError(CoopDynError, ValueError):
    pass


class OracleCapError(CoopDynError, ValueError):
    pass


class PreconditionError(CoopDynError, ValueError):
    pass


class ContractInapplicableError(PreconditionError):
    """A check was requested on a map that does not meet its hypotheses."""


class NotApplicableError(PreconditionError):
    pass


class FeasibilityError(PreconditionError):
    """Source system is too large to embed into the requested target."""


class InfeasibleError(PreconditionError):
    pass


class InvalidAttractorError(PreconditionError):
    pass


class NotIrreducibleError(PreconditionError):
    pass


class InvalidPermutationError(CoopDynError, ValueError):
    pass


class InputRangeError(CoopDynError, ValueError):
    pass


class TheoremViolationError(CoopDynError, AssertionError):
    """Raised when a proven statement fails on a concrete instance.

    This should never fire; if it does, either the input broke a
    precondition that was not caught or the implementation is wrong.
    """


class ConstructionFailureError(CoopDynError, RuntimeError):
    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class MapFileError(CoopDynError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateStateError(MapFileError):
    pass


class IncompleteMapError(MapFileError):
    pass


class RangeError(MapFileError):
    pass
