"""Exception types raised across the package."""


class PsplibFormatError(ValueError):
    """Base class for problems found while reading a PSPLIB ``.mm`` file."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class MalformedHeader(PsplibFormatError):
    pass


class InconsistentJobCount(PsplibFormatError):
    pass


class DanglingSuccessor(PsplibFormatError):
    pass


class BadModeRow(PsplibFormatError):
    pass


class BoundsTableError(ValueError):
    pass


class DuplicateKey(BoundsTableError):
    pass


class NonIntegerMakespan(BoundsTableError):
    pass


class InfeasibleInstance(ValueError):
    """Reduction removed every mode of some activity."""


class NoFeasibleModeAssignment(InfeasibleInstance):
    pass


class ZeroCapacity(ZeroDivisionError):
    pass


class DeadlineTooTight(ValueError):
    pass


class UnschedulableMode(ValueError):
    """A mode requests more of a renewable resource than its capacity."""


class BudgetZero(ValueError):
    pass


class TooLarge(ValueError):
    pass


class MissingBound(KeyError):
    pass


class EmptyResultSet(ValueError):
    pass


class ConfigurationError(ValueError):
    pass
