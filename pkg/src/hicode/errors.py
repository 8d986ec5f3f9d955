"""Exception types raised across the package."""


class HicodeError(Exception):
    """Base class for all errors raised by hicode."""


class InvalidWeight(HicodeError, ValueError):
    pass


class SelfLoop(HicodeError, ValueError):
    pass


class IncompleteLayer(HicodeError, ValueError):
    pass


class EmptyGraph(HicodeError, ValueError):
    pass


class ZeroWeightGraph(HicodeError, ValueError):
    pass


class HeterogeneousWeights(HicodeError, ValueError):
    pass


class ConfigError(HicodeError, ValueError):
    pass


class DomainMismatch(HicodeError, ValueError):
    pass


class EmptyCommunitySet(HicodeError, ValueError):
    pass


class InvalidParam(HicodeError, ValueError):
    pass


class UnknownLabel(HicodeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(HicodeError, ValueError):
    """Malformed input line. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
