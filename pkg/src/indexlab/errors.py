"""Exception and warning types raised by the numerical engines."""


class IndexLabError(Exception):
    """Base class for all library errors."""


class PoleError(IndexLabError, ValueError):
    """An argument sits on (or too close to) a pole of a gamma-type factor."""


class EnvelopeError(IndexLabError, ValueError):
    """Argument lies outside the supported evaluation envelope."""


class SeriesDivergenceError(IndexLabError, ArithmeticError):
    """A series did not meet its termination rule within the term budget."""


class DivergentSeriesError(IndexLabError, ValueError):
    """A non-terminating pFq series with p > q was requested."""


class NonConvergenceError(IndexLabError, ArithmeticError):
    """A quadrature ran out of refinement or truncation budget."""


class EndpointSingularityError(NonConvergenceError):
    """Refinement near t = 0 failed to stabilise on the semi-axis."""


class SlowDecayError(NonConvergenceError):
    """The integrand tail on an infinite contour does not fall fast enough.

    The ``diagnostic`` attribute carries a short human-readable description
    of the tail probe that failed.
    """

    def __init__(self, message, diagnostic=""):
        super().__init__(message)
        self.diagnostic = diagnostic


class AsymmetryError(IndexLabError, ValueError):
    """An integrand declared even failed the evenness spot-check."""


class RegionError(IndexLabError, ValueError):
    """Parameter outside the region where a kernel or transform converges."""


class StripError(RegionError):
    """Parameter outside the strip of a Mellin image or inversion formula."""


class MembershipError(IndexLabError, ValueError):
    """A Mellin image failed the weighted-L1 membership probe."""


class UnderflowNote(UserWarning):
    """Result magnitude fell below the representable floor; 0 was returned."""


class DivergenceWarning(UserWarning):
    """Weighted norm integrand grows along the probed tail."""
