from . import _

__all__ = [
    "Error",
    "DimensionError",
    "DimensionCapError",
    "IntegrationError",
    "InvalidSubsetError",
    "DomainError",
    "InternalConsistencyError",
    "MalformedModelError",
    "AsymmetricShuffleError",
    "UnsupportedModelError",
    "InvalidConfigError",
    "MissingSectionError"
]


class Error(Exception):
    """
    A generic ordertau Error.

    :ivar dict payload: arbitrary data

    """

    def __init__(self, *args, **kwargs):
        """"""
        super().__init__(*args, **kwargs)
        self.payload = {}


class DimensionError(Error):
    """
    An ``ordertau.Error`` signalling that dimensions do not fit.
    When raised for a mismatch, the payload has an ``expected`` and an ``actual`` key.
    """

    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        if expected is not None:
            self.payload.update(expected=expected, actual=actual)


class DimensionCapError(DimensionError):
    """
    A more specific ``ordertau.DimensionError`` signalling that a dimension exceeds a documented runtime cap.
    ``DimensionCapError.payload["d"]`` is the requested dimension,
    ``DimensionCapError.payload["cap"]`` is the largest supported one.
    """

    def __init__(self, d, cap, what):
        super().__init__(_("{} is limited to d <= {}, but d = {} was requested.").format(what, cap, d))
        self.payload.update(d=d, cap=cap)


class IntegrationError(Error):
    """
    An ``ordertau.Error`` signalling that an iterated integration step is not defined.
    ``IntegrationError.payload["variable"]`` is the offending variable index (1-based).
    """

    def __init__(self, message, variable):
        super().__init__(message)
        self.payload.update(variable=variable)


class InvalidSubsetError(Error):
    """
    An ``ordertau.Error`` signalling that a coordinate subset K is invalid.
    The payload has a ``d`` and a ``members`` key.
    """

    def __init__(self, message, d, members):
        super().__init__(message)
        self.payload.update(d=d, members=list(members))


class DomainError(Error):
    """An ``ordertau.Error`` signalling that an argument lies outside an operation's domain."""
    pass


class InternalConsistencyError(Error):
    """An ``ordertau.Error`` signalling that two exact routes to the same value disagree."""
    pass


class MalformedModelError(Error):
    """An ``ordertau.Error`` signalling that a copula model (or its textual spec) is malformed."""
    pass


class AsymmetricShuffleError(MalformedModelError):
    """A more specific ``ordertau.MalformedModelError`` signalling that a shuffle is not exchangeable."""
    pass


class UnsupportedModelError(Error):
    """An ``ordertau.Error`` signalling that a model lacks a closed form required by an operation."""
    pass


class InvalidConfigError(Error):
    """An ``ordertau.Error`` signalling that a preset file is invalid."""
    pass


class MissingSectionError(InvalidConfigError):
    """A more specific ``ordertau.InvalidConfigError`` signalling that the ``ordertau`` section is missing."""
    pass
