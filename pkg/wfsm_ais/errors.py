"""
Exception hierarchy for the WFSM repertoire engine.
"""

from typing import Optional


class WfsmAisError(ValueError):
    """Base class for all input and consistency errors raised by wfsm_ais."""


class AlphabetError(WfsmAisError):
    """A symbol is outside the alphabet, or two machines disagree on it."""


class LengthMismatchError(WfsmAisError):
    """A string or machine does not have the expected length."""


class EnumerationLimitError(WfsmAisError):
    """A language is too large to be listed."""


class FormatError(WfsmAisError):
    """A file or descriptor could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantError(WfsmAisError):
    """A machine violates one of its structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class RuleError(WfsmAisError):
    """Invalid matching rule or bias table."""


class SelectionError(WfsmAisError):
    """Invalid selection input."""


class ExperimentConfigError(WfsmAisError):
    """Invalid experiment parameters."""
