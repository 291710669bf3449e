"""Exception types shared across the package."""

from __future__ import annotations


class AuctionMatchError(Exception):
    """Base class for all package errors."""


class InstanceFormatError(AuctionMatchError):
    """Raised when an instance file cannot be parsed.

    Carries the 1-based line number of the offending line when one exists.
    """

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class InvariantViolation(AuctionMatchError):
    """Raised by audit hooks when a run-state invariant fails.

    ``prop`` names the violated property so callers can report it without
    parsing the message.
    """

    def __init__(self, prop: str, detail: str):
        self.prop = prop
        self.detail = detail
        super().__init__(f"{prop}: {detail}")
