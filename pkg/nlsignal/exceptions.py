"""
Exceptions and warnings raised by nlsignal.
"""
from typing import List, Optional


class _Reconstructible:
    """Pickles through the constructor arguments, which differ from the formatted ``args``."""

    _args: tuple = ()

    def __reduce__(self):
        return (type(self), self._args)


class ConfigurationError(_Reconstructible, ValueError):
    """
    Raised when a detector configuration is invalid, or valid but outside the regime an
    operation was asked to evaluate (e.g. a lightband formula for a timelike Bob).
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")
        self.field = field
        self._args = (message, field)


class DivisionHazard(_Reconstructible, ArithmeticError):
    """
    Raised when a ratio is requested at a point where the local signal (the denominator) is
    numerically zero.
    """

    def __init__(self, denominator: float, threshold: float) -> None:
        super().__init__(
            f"|s2_local| = {abs(denominator):.3e} is below the division threshold {threshold:.0e}"
        )
        self.denominator = denominator
        self.threshold = threshold
        self._args = (denominator, threshold)


class QuadratureNonConvergence(_Reconstructible, RuntimeError):
    """
    Raised when a numerical integral fails to reach the requested tolerance or exhausts its
    evaluation budget. The best estimate is kept on the exception.
    """

    def __init__(
        self, value: float, error_estimate: float, evaluations: int, reason: str
    ) -> None:
        super().__init__(
            f"Quadrature did not converge ({reason}): best estimate {value:.17e}, "
            f"achieved error {error_estimate:.3e} after {evaluations} kernel calls"
        )
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations
        self._args = (value, error_estimate, evaluations, reason)


class SignChangeError(_Reconstructible, ValueError):
    """
    Raised when a fit is requested over values that change sign; the fits work in log|y| and
    cannot pass through a zero of an oscillating signal.
    """

    def __init__(self, n_positive: int, n_negative: int) -> None:
        super().__init__(
            f"Values change sign within the grid ({n_positive} positive, {n_negative} negative)"
        )
        self._args = (n_positive, n_negative)


class DegenerateGridError(ValueError):
    """
    Raised when a fit grid has too few points, repeated abscissae, or zero values.
    """


class SpecValidationError(ValueError):
    """
    Raised when an experiment specification (flags or config file) is malformed.
    """


class OracleMismatch(_Reconstructible, AssertionError):
    """
    Raised when a closed-form value and the quadrature oracle disagree beyond tolerance.
    """

    def __init__(self, closed_form: float, oracle: float, tolerance: float) -> None:
        super().__init__(
            f"closed form {closed_form:.17e} and oracle {oracle:.17e} differ by "
            f"{abs(closed_form - oracle):.3e} (tolerance {tolerance:.3e})"
        )
        self.closed_form = closed_form
        self.oracle = oracle
        self._args = (closed_form, oracle, tolerance)


class SweepFailure(_Reconstructible, Exception):
    """
    Raised when one or more sweep points fail while being evaluated concurrently.
    """

    def __init__(self, exceptions: List[Exception]) -> None:
        message = ",\n\t".join(
            f"{type(exception).__name__}: {str(exception)}" for exception in exceptions
        )
        super().__init__(f"One or more sweep points failed:\n\t{message}")
        self.exceptions = exceptions
        self._args = (exceptions,)


class PrecisionWarning(RuntimeWarning):
    """
    Issued when a result is returned with known accuracy loss.
    """
