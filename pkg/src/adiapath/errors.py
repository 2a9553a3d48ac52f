"""Exception types shared across the package, mapped to CLI exit codes."""


class AdiapathError(Exception):
    """Base class for package errors."""


class DimensionError(AdiapathError):
    """Mismatched qubit counts or vector lengths."""


class CapacityError(AdiapathError):
    """Dense-representation guard exceeded."""


class ContractError(AdiapathError):
    """A documented precondition or postcondition was violated."""


class ParseError(AdiapathError):
    """Malformed input file."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConfigError(AdiapathError):
    """Invalid experiment configuration (CLI exit code 2)."""


class GuardError(AdiapathError):
    """Zero-gradient guard refusal (CLI exit code 3)."""


class OptimizerError(AdiapathError):
    """Optimizer aborted on non-finite values."""
