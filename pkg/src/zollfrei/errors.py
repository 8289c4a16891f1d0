"""Exception types shared across the package."""


class ZollfreiError(Exception):
    """Base class for all package errors."""


class QuadratureError(ZollfreiError):
    """Panel doubling failed to stabilise.

    Attributes
    ----------
    estimates : tuple
        The last two estimates produced before giving up.
    location : object
        Optional description of where the failure happened (e.g. a pole).
    """

    def __init__(self, message, estimates=(), location=None):
        super().__init__(message)
        self.estimates = tuple(estimates)
        self.location = location


class DomainError(ZollfreiError, ValueError):
    """An input lies outside the domain of an operation."""


class AsymptoticError(ZollfreiError):
    """The linear asymptotic regime of a solution could not be verified."""


class AliasingError(ZollfreiError):
    """Fourier coefficients did not decay within the allowed order."""


class PoleError(ZollfreiError, ValueError):
    """Evaluation requested at a pole of a series."""


class StateError(ZollfreiError):
    """An object was used before a required solve step."""
