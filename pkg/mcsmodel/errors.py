"""
Error hierarchy for the MCS model toolkit.

Every failure raised by the package derives from McsError so callers
(and the CLI) can separate failure classes without string matching.
"""

from typing import Optional, Tuple


class McsError(Exception):
    """Base exception for MCS model errors."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.pair = pair

    def with_pair(self, i: int, j: int) -> "McsError":
        """Attach the matrix cell this error was raised from."""
        self.pair = (i, j)
        self.args = (f"pair ({i}, {j}): {self.args[0]}",)
        return self


class InputError(McsError):
    """Raised on malformed documents, unknown identifiers or missing labels."""
    pass


class CapExceededError(McsError):
    """Raised when an input is larger than the configured scale cap."""

    def __init__(self, what: str, required: int, cap: int):
        super().__init__(f"{what}: size {required} exceeds cap {cap} (raise the cap to at least {required})")
        self.what = what
        self.required = required
        self.cap = cap


class ModelViolationError(McsError):
    """Raised when a model does not satisfy an axiom an operation relies on."""
    pass


class ContractViolationError(McsError):
    """Raised when a caller breaks an operation precondition."""
    pass
