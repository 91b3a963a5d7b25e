"""Exception types. Every error carries a stable ``code`` string used by the CLI."""

from __future__ import annotations


class QLambdaError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details


class SpecMismatch(QLambdaError):
    code = "SPEC_MISMATCH"


class WrongCase(QLambdaError):
    code = "WRONG_CASE"


class PrecisionExhausted(QLambdaError):
    code = "PRECISION_EXHAUSTED"


class IndexRange(QLambdaError):
    code = "INDEX_RANGE"


class NotInQ(QLambdaError):
    code = "NOT_IN_Q"


class NotPartialIsometry(QLambdaError):
    code = "NOT_PARTIAL_ISOMETRY"


class NotModular(QLambdaError):
    code = "NOT_MODULAR"


class UnsupportedSpec(QLambdaError):
    code = "UNSUPPORTED_SPEC"


class NotInGamma(QLambdaError):
    """A breakpoint or translation that must lie in the ring lies outside it."""

    code = "NOT_IN_GAMMA"


class InvalidSpec(QLambdaError):
    """Raised when an operation needs a validated spec and validation failed."""

    code = "INVALID_SPEC"

    def __init__(self, report):
        codes = ", ".join(v.code for v in report.violations)
        super().__init__(f"invalid lambda spec ({codes})")
        self.report = report


class ParseError(QLambdaError):
    code = "PARSE"

    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column, self.text, self.pos = line, col, text, pos
        super().__init__(f"{message} at line {line}, column {col}")

    def caret(self) -> str:
        """The offending line with a caret under the error column."""
        if not self.text:
            return ""
        lines = self.text.split("\n")
        return lines[self.line - 1] + "\n" + " " * (self.column - 1) + "^"
