"""Exception types shared across the package.

Kept in a leaf module so that both kernel backends (pure and compiled) can
raise the same classes without import cycles.
"""

from __future__ import annotations


class HeckelabError(Exception):
    """Base class for all package-specific errors.

    ``payload`` carries machine-readable diagnostics; the CLI serializes it
    as JSON.
    """

    exit_code = 1

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = dict(payload)

    def as_json(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "detail": self.payload,
        }


class ValidationError(HeckelabError):
    """Bad user input: malformed arguments, configs, or datasets."""

    exit_code = 1


class CheckFailure(HeckelabError):
    """A mathematical self-check or verification check failed."""

    exit_code = 2


class BudgetError(HeckelabError):
    """A computation would exceed its configured work budget."""

    exit_code = 3


class EnvelopeError(HeckelabError):
    """A rejection-sampling envelope was found to be violated."""

    exit_code = 2


class ExtractionError(HeckelabError):
    """Root extraction from Hecke eigenvalues failed to converge."""

    exit_code = 2
