"""Semantic exception hierarchy shared by all modules."""


class AnytimeVilleError(Exception):
    """Base class for errors raised by this package."""


class DomainError(AnytimeVilleError, ValueError):
    """Input lies outside the domain of a curve or special function."""


class ExtrapolationError(DomainError):
    """A tabulated curve was queried beyond its table range."""


class UnsupportedError(AnytimeVilleError, TypeError):
    """Operation is undefined for this curve kind (e.g. tabulated input)."""


class InvalidQuery(AnytimeVilleError, ValueError):
    """Bound or simulation query violates a precondition."""


class CalibrationError(AnytimeVilleError, ValueError):
    """No valid parameterization achieves the requested confidence level."""
