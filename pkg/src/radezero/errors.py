"""Error types shared across the package.

Every numerical failure mode raised by the library derives from
RadezeroError so the CLI can map it to a stable exit code and print
the class name on stderr.
"""

from __future__ import annotations


class RadezeroError(Exception):
    """Base class for all library-level failures."""


class TooFewTerms(RadezeroError):
    """Profile has fewer live coefficients than the operation needs."""


class DegenerateGroup(RadezeroError):
    """Central group collapsed onto the truncation boundary."""


class Saturated(DegenerateGroup):
    """Truncation cannot certify the requested radius or target."""


class TooLarge(RadezeroError):
    """Exhaustive enumeration was requested beyond the guard size."""


class NoConvergence(RadezeroError):
    """Adaptive quadrature hit its subdivision cap before the tolerance."""


class ZeroNearCircle(RadezeroError):
    """A zero sits too close to the evaluation circle to certify a count."""


class RootFindingFailure(RadezeroError):
    """Root residuals could not be certified below the required bound."""


class OutOfRange(RadezeroError):
    """Query point lies outside the range covered by the built ladder."""


class NotConvex(RadezeroError):
    """Generalized ladder targets must be increasing and convex."""


class NotCentralDominant(RadezeroError):
    """Operation requires a profile built by the central-dominant recipe."""


class ConstructionFailed(RadezeroError):
    """A coefficient construction failed its own verification step."""


class OverflowGuard(RadezeroError):
    """Requested parameters would push log-magnitudes outside safe range."""
