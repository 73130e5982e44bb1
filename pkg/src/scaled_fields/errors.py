"""Exception hierarchy shared by every module."""


class ScaledFieldsError(Exception):
    """Base class for all library errors."""


class CrossUniverseError(ScaledFieldsError):
    """Two values tagged with different universes were combined directly."""


class ScaleMismatchError(ScaledFieldsError):
    """Two values in the same universe carry different scaling factors."""


class DimensionMismatchError(ScaledFieldsError, ValueError):
    pass


class DomainError(ScaledFieldsError, ValueError):
    """Argument outside the domain of a map, field, or structure."""


class ScaledArithmeticError(ScaledFieldsError, ArithmeticError):
    """Division by the structure zero, or a function evaluated off its domain."""


class ChartRangeError(DomainError):
    """Coordinate outside the numerically invertible range of a chart."""


class ScaleOverflowError(ScaledFieldsError, OverflowError):
    """A scaling factor exp(dtheta) would overflow or underflow."""


class IntegrandError(ScaledFieldsError, ArithmeticError):
    """An integrand produced a non-finite value on the quadrature grid."""


class ConfigError(ScaledFieldsError, ValueError):
    """Invalid run configuration or quadrature specification."""
