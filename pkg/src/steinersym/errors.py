"""Exception types shared across the package."""


class SteinerError(Exception):
    """Base class for all errors raised by steinersym."""


class InvalidInput(SteinerError, ValueError):
    pass


class PreconditionViolation(SteinerError, ValueError):
    pass


class ConstructionFailure(SteinerError, RuntimeError):
    """Conformal map construction did not reach the requested accuracy."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class PrecisionFailure(SteinerError, RuntimeError):
    pass


class CoefficientPrecisionFailure(PrecisionFailure):
    pass


class EvaluationOutOfRange(SteinerError, ValueError):
    pass


class StepFailure(SteinerError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ApproximationDegraded(UserWarning):
    """A polygonal approximation may not be a simple polygon."""
