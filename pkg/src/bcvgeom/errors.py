"""Exception hierarchy shared by all modules."""


class BCVGeomError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BCVGeomError):
    """Point lies outside the chart 1 + (kappa/4)(x^2 + y^2) > 0."""


class StencilError(BCVGeomError):
    """Finite-difference stencil does not fit inside the valid domain."""


class ImmersionError(BCVGeomError):
    """Tangent plane is degenerate (rank < 2) at the requested point."""


class DegenerateAngleError(BCVGeomError):
    """theta is at (or numerically at) 0 or pi/2, so the {T, JT} basis
    is unavailable; request an orthonormal-basis representation instead."""


class PoleError(BCVGeomError):
    """Evaluation too close to a pole of tan in one of the closed forms."""


class InvalidSpecError(BCVGeomError):
    """Surface-family parameters violate the family's constraints."""


class NonIntegrableError(BCVGeomError):
    """theta = 0 with tau != 0: the horizontal distribution is not
    integrable, so no such constant angle surface exists."""


class UnsolvedBranchError(BCVGeomError):
    """r^2 = kappa sin^2(theta) + 4 tau^2 cos^2(theta) <= 0; only the
    strictly positive branch has closed forms."""
