"""
Custom exceptions for the laboratory.

Every exception carries the process exit code the CLI reports for it.
"""
from typing import Optional

EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_CAPACITY = 4


class BosonLabException(Exception):
    """Base exception for the laboratory."""

    def __init__(self, message: str, exit_code: int = 1):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationException(BosonLabException):
    """Invalid input: malformed file, bad parameter, violated precondition."""

    def __init__(self, message: str = "Validation failed", path: Optional[str] = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message, EXIT_VALIDATION)


class ParseException(ValidationException):
    """Input file could not be parsed."""

    def __init__(self, message: str = "Could not parse input", path: Optional[str] = None):
        super().__init__(message, path)


class SymmetryViolationException(ValidationException):
    """Operator is not hermitian or not exchange-symmetric."""

    def __init__(self, message: str = "Symmetry violated", path: Optional[str] = None,
                 max_asymmetry: float = 0.0):
        self.max_asymmetry = max_asymmetry
        super().__init__(f"{message} (max asymmetry {max_asymmetry:.3e})", path)


class DimensionMismatchException(ValidationException):
    """Operand dimensions disagree."""

    def __init__(self, message: str = "Dimension mismatch", path: Optional[str] = None):
        super().__init__(message, path)


class OrderOutOfRangeException(ValidationException):
    """Requested reduced density matrix order is outside [0, N]."""

    def __init__(self, message: str = "Order out of range"):
        super().__init__(message)


class DegeneracyException(ValidationException):
    """Lowest one-body level is degenerate where a gap is required."""

    def __init__(self, message: str = "Lowest eigenvalue is degenerate"):
        super().__init__(message)


class ConvergenceException(BosonLabException):
    """Numerical method failed to converge."""

    def __init__(self, message: str = "Numerical method did not converge"):
        super().__init__(message, EXIT_CONVERGENCE)


class InvariantViolationException(ConvergenceException):
    """A numerical identity or inequality failed beyond tolerance."""

    def __init__(self, message: str = "Invariant violated"):
        super().__init__(message)


class CapacityException(BosonLabException):
    """Requested space exceeds the configured capacity."""

    def __init__(self, message: str = "Capacity exceeded"):
        super().__init__(message, EXIT_CAPACITY)
