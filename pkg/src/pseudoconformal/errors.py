"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Base class for geometric precondition and consistency failures."""


class NotOnQuadricError(GeometryError):
    """A homogeneous vector that should lie on the absolute quadric does not."""


class NotLightlikeError(GeometryError):
    """Operation requires a degenerate induced metric at the given point."""


class DegenerateBasisError(GeometryError):
    """Supplied basis vectors (or basis 1-forms) are linearly dependent."""


class NonIntegrableError(GeometryError):
    """The transversal 1-form is not integrable; no foliation exists."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
