"""
Error types raised across underfit components
"""
from typing import Any, Optional


class UnderfitError(Exception):
    """Base class for every error the library raises on purpose"""


class InvalidParams(UnderfitError):
    """Configuration or command parameters out of range"""


# Linear algebra / factorization

class ZeroMatrix(UnderfitError):
    """Input matrix has zero Frobenius norm"""


class NoConvergence(UnderfitError):
    """Iteration budget spent before the tolerance was met"""
    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result  # Last iterate


class DegenerateFactor(UnderfitError):
    """A factor collapsed to zero during the ADMM iterations"""


class NegativeEntry(UnderfitError):
    """A matrix that must be nonnegative has a negative entry"""
    def __init__(self, row: int, col: int, value: float):
        super().__init__(f"Negative entry {value!r} at row {row + 1}, column {col + 1}")
        self.row = row
        self.col = col
        self.value = value


class MatrixFormatError(UnderfitError):
    """Malformed CSV matrix"""
    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


# Geometry

class SingularModel(UnderfitError):
    """Model cannot be applied (e.g. non-invertible homography)"""


class DegenerateSample(UnderfitError):
    """Minimal sample does not determine a unique model"""


class InsufficientSupport(UnderfitError):
    """Fewer positive weights than the minimal sample size"""


# Preference / robust fitting

class PoolExhausted(UnderfitError):
    """Too many degenerate draws while sampling hypotheses"""


class EmptyPreference(UnderfitError):
    """No active nonzero column left in the preference matrix"""


class LengthMismatch(UnderfitError):
    """Label sequences of different lengths"""
