"""
Exception hierarchy. Every error carries the CLI exit code it maps to.
"""
from __future__ import annotations


EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_BOUND_VIOLATION = 3
EXIT_NO_CONVERGENCE = 4


class FFCorrError(Exception):
    exit_code = EXIT_VALIDATION


class ModelFormatError(FFCorrError):
    """Structural problem in a model description."""
    exit_code = EXIT_IO

    def __init__(self, message: str, term_index: int | None = None):
        self.term_index = term_index
        if term_index is not None:
            message = f"term {term_index}: {message}"
        super().__init__(message)


class DomainError(FFCorrError):
    """Parameter outside the domain of a formula or model family."""


class PreconditionError(FFCorrError):
    pass


class ScheduleMismatchError(PreconditionError):
    pass


class DegenerateRangeError(FFCorrError):
    """Range r = 1: single-site terms, the causal-cone identity holds for every m."""


class NotPSDError(FFCorrError):
    pass


class NotHermitianError(FFCorrError):
    pass


class DenseLimitError(FFCorrError):
    pass


class NotFrustrationFreeError(FFCorrError):
    pass


class InconsistencyError(FFCorrError):
    """Zero total energy but a nonzero per-term residual."""


class InsufficientDataError(FFCorrError):
    pass


class NoDecayError(FFCorrError):
    pass


class DeskScaleError(FFCorrError):
    pass


class ConvergenceError(FFCorrError):
    exit_code = EXIT_NO_CONVERGENCE

    def __init__(self, message: str, residuals: list[float] | None = None,
                 last_iterates: tuple[float, float] | None = None):
        self.residuals = residuals or []
        self.last_iterates = last_iterates
        if last_iterates is not None:
            message = f"{message} (last iterates {last_iterates[0]!r}, {last_iterates[1]!r})"
        if residuals:
            message = f"{message} (residuals {', '.join(f'{r:.3e}' for r in residuals)})"
        super().__init__(message)
