"""Exception types shared across the package."""


class DampedQHOError(Exception):
    """Base class for all package errors."""


class ConvergenceError(DampedQHOError):
    """A quadrature did not reach its tolerance within the panel budget.

    Attributes
    ----------
    quantity : str
        Name of the quantity being integrated.
    error_estimate : float
        Best error estimate reached before giving up.
    time : float or None
        Time argument of the failing evaluation, when there is one.
    """

    def __init__(self, quantity, error_estimate, time=None, order=None):
        self.quantity = quantity
        self.error_estimate = float(error_estimate)
        self.time = time
        self.order = order
        where = "" if time is None else f" at t={time:g}"
        if order is not None:
            where += f" (derivative order {order})"
        super().__init__(
            f"quadrature for {quantity}{where} did not converge; "
            f"achieved error estimate {self.error_estimate:.3e}"
        )


class DivergentIntegralError(DampedQHOError):
    """Gaussian integral whose quadratic form has a non-positive real part."""

    def __init__(self, eigenvalue, context=""):
        self.eigenvalue = float(eigenvalue)
        sign = "negative" if eigenvalue < 0 else "zero"
        msg = (f"real part of quadratic form is not positive definite: "
               f"{sign} eigenvalue {eigenvalue:.3e}")
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class GridError(DampedQHOError, ValueError):
    """Off-grid time or mismatched grids."""


class MaskedTimeError(DampedQHOError, ValueError):
    """Query at a time where coefficients are masked (wronskian zero)."""


class PhysicalityError(DampedQHOError, ValueError):
    """Gaussian state violating the uncertainty relation."""


class PoleError(DampedQHOError, ZeroDivisionError):
    """Susceptibility evaluated on a pole of the lossless oscillator."""


class ConfigError(DampedQHOError, ValueError):
    """Invalid run configuration."""
