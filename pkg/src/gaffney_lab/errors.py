"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularGradientError(DomainError):
    """The level-set gradient is too small to define a unit normal."""


class BoundaryConditionError(DomainError):
    """A field violates the requested boundary condition."""

    def __init__(self, message: str, residual: float, location=None):
        super().__init__(message)
        self.residual = residual
        self.location = location


class FrameError(DomainError):
    """A principal-curvature frame could not be built at a point."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class CoverageError(RuntimeError):
    """Boundary patches do not integrate 1 to the known surface measure."""
