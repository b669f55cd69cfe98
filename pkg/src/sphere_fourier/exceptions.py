class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class ResolutionError(ValueError):
    """Quadrature resolution too low for the requested rule."""


class DenominatorError(ArithmeticError):
    """Radial profile vanished at every admissible reference radius."""


class QuadratureError(ArithmeticError):
    """Two independent quadrature estimates failed to agree."""


class IndexOutOfRange(IndexError):
    """Harmonic index outside the enumerated basis."""
