from __future__ import annotations

from typing import Optional


class CondenseLabError(Exception):
    """Base class for every error raised by condenselab."""


class InputShapeError(CondenseLabError, ValueError):
    pass


class CapacityError(CondenseLabError):
    """A solver cap or enumeration budget would be exceeded."""

    def __init__(self, cap_name: str, limit: int, required: int, detail: Optional[str] = None) -> None:
        self.cap_name = cap_name
        self.limit = limit
        self.required = required
        message = f"{cap_name} is {limit} but {required} is required"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class MalformedClaimError(CondenseLabError, ValueError):
    pass


class ProtocolError(CondenseLabError):
    pass


class ConfigError(CondenseLabError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(CondenseLabError, ValueError):
    pass
