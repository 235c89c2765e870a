"""Exception types shared across the package.

The CLI maps these onto exit codes (see :mod:`perco_iso.cli`).
"""


class PercoIsoError(Exception):
    pass


class ParseError(PercoIsoError, ValueError):
    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} (at position {position} in {text!r})")
        self.text = text
        self.position = position


class OracleError(PercoIsoError):
    pass


class PaddingError(PercoIsoError):
    """The window is too small for the requested computation to be exact."""


class BudgetExceeded(PercoIsoError):
    def __init__(self, message, partial_count=None):
        super().__init__(message)
        self.partial_count = partial_count


class DomainError(PercoIsoError, ValueError):
    pass


class UnsupportedError(PercoIsoError):
    pass


class InsufficientData(PercoIsoError, ValueError):
    pass
