"""Exception types raised across the package.

Everything derives from :class:`FieldTheoryError` (itself a ``ValueError``) so
callers can catch numeric-stage failures with one clause.
"""


class FieldTheoryError(ValueError):
    """Base class for invalid inputs or failed numeric stages."""


class NonFiniteFieldError(FieldTheoryError):
    pass


class GridMismatchError(FieldTheoryError):
    pass


class NoGapError(FieldTheoryError):
    """Fewer than two local minima were found."""


class NoLocalMinimaError(FieldTheoryError):
    """The tilt is too strong for the washboard to keep local minima."""


class UnsupportedFamilyError(FieldTheoryError):
    pass


class BoundarySaturationError(FieldTheoryError):
    """The grid is too narrow for the profile to reach its vacua."""


class AnsatzValidityError(FieldTheoryError):
    """Kink and antikink overlap too much for the additive pair ansatz."""


class DegenerateVacuumError(FieldTheoryError):
    """Zero energy gap: no finite pair separation or width."""


class CollapsedWidthError(FieldTheoryError):
    pass


class UnstableExpansionError(FieldTheoryError):
    """Negative curvature where a Gaussian kernel is requested."""


class NormalizationError(FieldTheoryError):
    pass


class SurfacePlacementError(FieldTheoryError):
    pass


class NoBarrierError(FieldTheoryError):
    pass


class TrajectoryPlacementError(FieldTheoryError):
    pass
