"""Exception types raised by the rotkepler modules."""


class RotKeplerError(Exception):
    """Base class for all library errors."""


class CollisionStateError(RotKeplerError, ValueError):
    """A state with the position at (or numerically at) the origin."""


class FrameSingularError(RotKeplerError):
    """The contact-plane frame degenerates (``t*x + 1`` vanishes)."""


class DegenerateCrossingError(RotKeplerError):
    """A crossing form is degenerate, or the terminal matrix has eigenvalue 1."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class UnresolvedCrossingError(RotKeplerError):
    """Crossing search did not stabilise under grid refinement."""


class StepUnderflowError(RotKeplerError):
    """Required integration step fell below the allowed minimum."""


class NonIntegerCoveringError(RotKeplerError):
    """A solved covering number is not close to an integer."""


class BookkeepingMismatchError(RotKeplerError):
    """Two independent routes to a torus index disagree."""


class CatalogAssertionError(RotKeplerError):
    """A dynamical-convexity assertion failed on a concrete orbit record."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class RayMissError(RotKeplerError):
    """A ray from the origin does not meet the compact energy component."""


class GradientVanishesError(RotKeplerError):
    """The defining function has a critical point on the sample."""
