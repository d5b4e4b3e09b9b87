"""Exception types shared across the package."""


class MaryError(Exception):
    """Base class for all errors raised by maryec."""


class ContractViolation(MaryError, ValueError):
    """A precondition of an operation was not met by the caller."""


class NonInvertibleError(MaryError, ZeroDivisionError):
    pass


class NotFoundError(MaryError, KeyError):
    def __str__(self) -> str:
        # KeyError quotes its argument; keep messages one-line and plain
        return str(self.args[0]) if self.args else ""


class FaultDetected(MaryError):
    """A stored precomputed point failed the curve-equation check."""

    def __init__(self, message: str, cell: tuple[int, int] | None = None) -> None:
        super().__init__(message)
        self.cell = cell


class EncodingError(MaryError):
    pass


class FormatError(MaryError):
    """Malformed serialized data (hex, table file, ciphertext file)."""


class ConfigError(MaryError, ValueError):
    pass
