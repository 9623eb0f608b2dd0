"""
Exceptions for syndest library.
"""


class SyndestError(Exception):
    """Base exception for all syndest-related errors."""
    pass


class ConfigurationError(SyndestError, ValueError):
    """Raised when parameters or a configuration violate their constraints."""
    pass


class ConstructionError(SyndestError):
    """Raised when a parity-check matrix cannot be built within the retry budget."""
    pass


class AlistParseError(ConfigurationError):
    """Raised when alist text is malformed. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DimensionError(SyndestError, ValueError):
    """Raised when a vector length does not match the matrix it is used with."""
    pass


class DomainError(SyndestError, ValueError):
    """Raised when an argument lies outside the function's domain."""
    pass


class DivergenceError(DomainError):
    """Raised when the requested quantity diverges at the given argument."""
    pass
