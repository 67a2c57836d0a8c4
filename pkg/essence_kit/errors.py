# essence_kit/errors.py
"""Exception hierarchy; ``exit_code`` is what the CLI hands to ``sys.exit``."""
from __future__ import annotations


class EssenceKitError(Exception):
    exit_code = 1


class DiagramParseError(EssenceKitError):
    exit_code = 2

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class DiagramValidationError(EssenceKitError):
    exit_code = 3


class NotColorableError(EssenceKitError):
    exit_code = 4


class HypothesisError(EssenceKitError):
    """A theorem's hypotheses are not met; ``failed`` names the flags."""

    exit_code = 5

    def __init__(self, message: str, failed: tuple[str, ...] = ()):
        self.failed = tuple(failed)
        super().__init__(message)


class BudgetExceeded(EssenceKitError):
    exit_code = 6

    def __init__(self, message: str, nodes: int = 0):
        self.nodes = nodes
        super().__init__(message)


class IntegrityError(EssenceKitError):
    exit_code = 7


class SelftestFailure(EssenceKitError):
    exit_code = 8


class UsageError(EssenceKitError):
    exit_code = 64
