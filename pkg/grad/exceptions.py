from __future__ import annotations

from typing import Optional


class GradError(Exception):
    pass


class GradeError(GradError):
    pass


class CarrierTooLarge(GradError):
    pass


class SemiringConfigError(GradError):
    pass


class ContextError(GradError):
    pass


class FlagsError(GradError):
    pass


class PreconditionViolated(GradError):
    pass


class AnalysisError(GradError):
    pass


class ParseError(GradError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class TypeCheckError(GradError):
    """
    Raised when a term is rejected by one of the checkers.

    The `kind` is a short machine-readable tag (e.g. "unbound-variable",
    "declared-usage-insufficient") that the CLI prints in its error prefix.

    """

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(f"{kind} {message}")
        self.kind = kind
        self.message = message


class FuelExhausted(GradError):
    def __init__(self, steps: int, message: Optional[str] = None) -> None:
        super().__init__(message or f"fuel exhausted after {steps} steps")
        self.steps = steps


class StuckError(GradError):
    def __init__(self, reason: str, var: Optional[str] = None) -> None:
        super().__init__(f"{reason} {var}" if var else reason)
        self.reason = reason
        self.var = var
