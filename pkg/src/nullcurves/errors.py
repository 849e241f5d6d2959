"""Exception types raised across the package."""


class NullCurveError(Exception):
    """Base class for all package errors."""


class SingularElement(NullCurveError):
    """Dual element with p = 0; its isotropy algebra is not 2-dimensional."""


class NotNormalized(NullCurveError):
    """Curve parameter is not the normalized one (||alpha''|| != 1)."""


class NotNull(NullCurveError):
    """Velocity is not a future-directed null vector."""


class FlexPoint(NullCurveError):
    """alpha' and alpha'' are linearly dependent."""


class IntegrationFailure(NullCurveError):
    """An ODE solve did not reach the requested accuracy."""


class NonFiniteState(NullCurveError):
    """Phase state escaped to infinity (finite-time blow-up)."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class DegenerateCubic(NullCurveError):
    """Weierstrass cubic has a repeated root (D = 0)."""


class NearPole(NullCurveError):
    """Argument too close to a lattice point of the Weierstrass function."""


class WrongBranch(NullCurveError):
    """Requested solution branch does not exist for these invariants."""


class SingularOrbit(NullCurveError):
    """Coadjoint orbit of a singular element (p = 0)."""


class FrameDegenerate(NullCurveError):
    """A cross-section recipe divides by a vanishing quantity."""


class NotInIsotropy(NullCurveError):
    """Gauge integrand leaves the isotropy algebra."""
