"""
Error hierarchy for the Unitary Constellation Designer
"""


class ConstellationError(Exception):
    """Base class for all errors raised by the package"""


class ValidationError(ConstellationError):
    """Invalid input: the message names the offending field or element"""


class ConstellationFormatError(ValidationError):
    """Malformed constellation file"""


class ReductionUnavailableError(ConstellationError):
    """Structure kind has no reduced distance-target set"""


class NumericError(ConstellationError):
    """Base class for numeric failures"""


class CayleySingularError(NumericError):
    """I + X is too close to singular for the Cayley transform"""

    def __init__(self, condition: float):
        super().__init__(f"I + X is near-singular (condition estimate {condition:.3e})")
        self.condition = condition


class ProjectionFailedError(NumericError):
    """Matrix is singular, no unique nearest unitary"""


class SvdNotConvergedError(NumericError):
    """One-sided Jacobi iteration exceeded its sweep cap"""


class QuadratureError(NumericError):
    """Adaptive quadrature did not meet tolerance within the depth cap"""


class ClampError(NumericError):
    """Metric value fell outside [0, 1] by more than the clamp tolerance"""
