"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ParseError -> 2, GuardViolation and
ValidationError -> 3.
"""


class ReebsmoothError(Exception):
    """Base class for all package errors."""


class ParseError(ReebsmoothError):
    """Malformed input file (OFF mesh, weighted-point CSV, JSON, config)."""

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class ValidationError(ReebsmoothError):
    """A type invariant or operation precondition is violated."""


class GuardViolation(ReebsmoothError):
    """Input exceeds a declared size/dimension guard."""
