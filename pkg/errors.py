"""
Exception hierarchy. Every error carries the CLI exit code it maps to.
"""
from typing import Sequence


class AnalysisError(Exception):
    """Base class for all errors raised by the toolkit."""

    exit_code = 3


class ConfigError(AnalysisError):
    """Invalid configuration or command-line usage."""

    exit_code = 1


class DataError(AnalysisError):
    """Input data violates a precondition (missing values, ordering, length)."""

    exit_code = 2


class NumericalError(AnalysisError):
    """An estimation step could not be carried out."""

    exit_code = 3


class DegenerateRegressionError(NumericalError):
    pass


class SingularRegressorError(NumericalError):
    """Regressor cross-product is singular; names the offending columns."""

    def __init__(self, columns: Sequence[str], message: str = None):
        self.columns = tuple(columns)
        if message is None:
            message = f"singular regressor cross-product; collinear columns: {', '.join(self.columns)}"
        super().__init__(message)


class InfeasibleGridError(NumericalError):
    pass


class StageError(AnalysisError):
    """An error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: AnalysisError):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", AnalysisError.exit_code)
        super().__init__(f"stage '{stage}' failed: {cause}")
