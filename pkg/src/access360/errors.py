"""Shared exception types."""

from __future__ import annotations


class Access360Error(Exception):
    """Base class for every error raised by this package."""


class MalformedXml(Access360Error):
    """Input is not well-formed XML."""


class RangeError(Access360Error):
    """A numeric attribute or parameter is outside its allowed range."""

    def __init__(self, attribute: str, value: object, detail: str = ""):
        self.attribute = attribute
        self.value = value
        message = f"{attribute}={value!r} out of range"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class InvariantViolation(Access360Error):
    """A model value breaks one of its documented invariants."""
