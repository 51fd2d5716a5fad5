"""Exception types raised across the package."""

from __future__ import annotations


class FidrouteError(Exception):
    """Base class for every error raised by fidroute."""


class ParameterDomainError(FidrouteError, ValueError):
    """A numeric argument lies outside the domain of the model."""


class UnreachableCapacityError(ParameterDomainError):
    """A requested generation probability cannot be reached (p >= 1/2)."""


class ConfigurationError(FidrouteError, ValueError):
    """Inconsistent inputs: mismatched grids, infeasible generator settings, bad config keys."""


class ValidationError(FidrouteError, ValueError):
    """A network or file violates a structural invariant."""


class NetworkFormatError(FidrouteError, ValueError):
    """A network file cannot be parsed."""


class NoRouteError(FidrouteError, LookupError):
    """No path with a nonzero Werner parameter exists for the query."""


class NoStarError(NoRouteError):
    """No candidate star center reaches all three targets."""


class OracleInfeasibleError(FidrouteError, RuntimeError):
    """An exhaustive enumeration would exceed its size guard."""
