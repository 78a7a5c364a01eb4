"""Exception types raised across the package."""


class MaxSchemeError(Exception):
    """Base class for all package errors."""


class DomainError(MaxSchemeError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnboundedError(DomainError):
    """The requested quantile is +inf (u = 1 with an unbounded right endpoint)."""


class UnsupportedError(MaxSchemeError):
    """The model does not carry enough structure for the request."""


class HorizonError(MaxSchemeError, IndexError):
    """A time or index query runs past the tabulated range."""


class FlowUnderflow(MaxSchemeError, ArithmeticError):
    """A Frechet state underflowed towards 0, which is outside the state space."""


class QuadratureError(MaxSchemeError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class EmptyInput(MaxSchemeError, ValueError):
    """A statistic was requested on an empty sample."""


class ParseError(MaxSchemeError, ValueError):
    """Malformed configuration text or model/type spec string."""


class CompatibilityError(MaxSchemeError, ValueError):
    """The distribution model does not lie in the declared domain of attraction."""
