class EGWError(Exception):
    """Base error; carries the CLI exit code"""

    exit_code = 3


class ValidationError(EGWError, ValueError):
    exit_code = 2


class MeasureValidationError(ValidationError):
    pass


class UncenteredMeasureError(ValidationError):
    pass


class InvalidStartError(ValidationError):
    pass


class OracleToleranceError(ValidationError):
    def __init__(self, message: str, suggested_minimum: float = None):
        super().__init__(message)
        self.suggested_minimum = suggested_minimum


class KernelOverflowError(EGWError, FloatingPointError):
    def __init__(self, message: str = "kernel overflow, increase eps or rescale data"):
        super().__init__(message)


class KernelUnderflowError(EGWError, FloatingPointError):
    def __init__(self, message: str = "kernel underflow, zero row or column sum in Sinkhorn"):
        super().__init__(message)


class HessianPrecisionError(EGWError):
    pass


class HSystemError(EGWError):
    def __init__(self, message: str = "h-system ill-conditioned"):
        super().__init__(message)


class SolverAbortError(EGWError):
    pass


class DebiasError(EGWError):
    """A constituent solve of the debiased value failed"""

    def __init__(self, term: str, cause: Exception):
        super().__init__(f"{term} failed: {cause}")
        self.term = term
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EGWError.exit_code)
