"""Exceptions raised by Fracrot.

Every exception carries the exit code the command line reports for it.
"""


class FracrotError(Exception):
    """Base class for all Fracrot errors."""

    exit_code = 1


class ValidationError(FracrotError, ValueError):
    """Invalid input, keyed by the name of the offending field."""

    exit_code = 2

    def __init__(self, errors):
        """Store the field errors.

        Args:
            errors (dict | str): Mapping of field name to message, or a single message.
        """
        if isinstance(errors, str):
            errors = {"__all__": errors}
        self.errors = dict(errors)
        super().__init__("; ".join(f"{key}: {message}" for key, message in self.errors.items()))


class UnsupportedError(FracrotError):
    """Valid input that a routine deliberately does not handle."""

    exit_code = 2


class DomainError(FracrotError, ValueError):
    """A point, argument or segment outside the domain where a quantity is defined."""

    exit_code = 3


class PreconditionError(FracrotError):
    """A mathematical precondition of a transformation law does not hold."""

    exit_code = 3


class RangeError(FracrotError, ArithmeticError):
    """A result does not fit in a double."""

    exit_code = 3


class EvaluationError(FracrotError):
    """A field or one of its derivatives produced a non-finite value."""

    exit_code = 3


class FitError(FracrotError):
    """No combination constant can be determined from the measured drifts."""

    exit_code = 1
