"""Exception hierarchy shared by all modules."""


class LikecentError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LikecentError, ValueError):
    pass


class ValidationError(LikecentError, ValueError):
    pass


class DegenerateGraphError(LikecentError, ValueError):
    """Raised when an operation needs a vertex with at least one neighbor."""


class DomainError(LikecentError, ValueError):
    pass


class NumericalError(LikecentError, ArithmeticError):
    pass


class ExperimentError(LikecentError, RuntimeError):
    pass


class ParseError(LikecentError, ValueError):
    """Malformed input text. ``line`` is 1-based, or None if not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(LikecentError, RuntimeError):
    """An iterative method hit its iteration cap before meeting tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
