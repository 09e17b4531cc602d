"""Exception hierarchy; the CLI maps each class to an exit code."""


class DeltaError(Exception):
    exit_code = 1


class PreconditionError(DeltaError, ValueError):
    exit_code = 2


class BudgetExceededError(DeltaError):
    exit_code = 3

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = progress


class VerificationError(DeltaError):
    """An internal consistency check failed. Always a bug."""

    exit_code = 4
