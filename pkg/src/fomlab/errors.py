"""Exception hierarchy shared by every fomlab module."""


class FomLabError(Exception):
    """Base class for all fomlab errors."""


class ParameterError(FomLabError, ValueError):
    """An argument is outside its admissible range."""


class DataError(FomLabError, ValueError):
    """Problem data is empty or malformed."""


class UnsupportedError(FomLabError):
    """The requested operation is not defined for this input."""


class OracleInconsistencyError(FomLabError):
    """An oracle reports values that contradict its own declarations."""


class ContractError(FomLabError):
    """A precondition on a previously computed object was not met."""


class InternalConsistencyError(FomLabError):
    """Two independent constructions of the same object disagree."""


class NumericalFailure(FomLabError, ArithmeticError):
    """A non-finite value appeared during an iteration."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
