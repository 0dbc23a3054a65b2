"""
Exception taxonomy.

Every error raised on purpose by the package derives from PdfForgeError and
carries the process exit code the CLI reports for it.
"""
from typing import Any, List, Optional


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4
EXIT_ENSEMBLE = 5


class PdfForgeError(Exception):
    """Base class for all pdf-forge errors"""
    exit_code: int = EXIT_DATA


class InvalidSampleError(PdfForgeError):
    """Raised when an input sample is malformed or empty"""
    exit_code = EXIT_USAGE

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class NonFiniteSampleError(InvalidSampleError):
    """Raised when a well-formed sample holds NaN or infinite values"""
    exit_code = EXIT_DATA


class SampleIOError(PdfForgeError):
    """Raised when a sample or model file cannot be read"""
    exit_code = EXIT_IO


class ArtifactExistsError(PdfForgeError):
    """Raised when an output would overwrite an existing artifact"""
    exit_code = EXIT_IO


class DegenerateDomainError(PdfForgeError):
    """Raised when the data has zero spread and no density can be defined"""
    exit_code = EXIT_DATA


class InsufficientDataError(PdfForgeError):
    """Raised when the analysis window keeps too few observations"""
    exit_code = EXIT_DATA


class InvalidModelError(PdfForgeError):
    """Raised when a model cannot be normalized"""
    exit_code = EXIT_DATA


class QuadratureError(PdfForgeError):
    """Raised on non-finite integrands or inconsistent cdf tables"""
    exit_code = EXIT_DATA


class CalibrationError(PdfForgeError):
    """Raised when a Monte Carlo calibration misses the size-law gates"""
    exit_code = EXIT_DATA

    def __init__(self, message: str, slope: float = float("nan"), intercept: float = float("nan")):
        super().__init__(message)
        self.slope = slope
        self.intercept = intercept


class DimensionCapReached(PdfForgeError):
    """Signal that the next dimension stage would exceed max_multipliers"""


class UnknownDistributionError(PdfForgeError):
    """Raised for distribution names missing from the registry"""
    exit_code = EXIT_USAGE


class EnsembleIncompleteError(PdfForgeError):
    """Raised when fewer acceptable solutions than requested were found"""
    exit_code = EXIT_ENSEMBLE

    def __init__(self, message: str, attempts: Optional[List[Any]] = None, ensemble: Optional[Any] = None):
        super().__init__(message)
        self.attempts = attempts or []
        self.ensemble = ensemble
