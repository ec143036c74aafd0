"""Exception types raised across the package."""


class DickmanError(Exception):
    """Base class for package errors."""


class ParameterError(DickmanError, ValueError):
    """Invalid parameter, argument domain, or configuration."""


class QuadratureError(DickmanError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved abs. error {achieved:.3g})")
        self.achieved = achieved
