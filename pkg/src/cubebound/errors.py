"""Exception hierarchy shared by every module."""


class CubeboundError(Exception):
    """Base class for all library errors."""


class DomainError(CubeboundError, ValueError):
    """Input violates an operation's precondition."""


class ResourceLimitError(CubeboundError):
    """A configured cap was exceeded.

    ``best`` carries the best partial answer when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InternalLimitError(CubeboundError):
    """An iterative procedure failed to stabilize within its bound."""


class VerificationError(CubeboundError):
    """A certificate or cross-check failed."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ParseError(CubeboundError, ValueError):
    """A fixture document could not be parsed."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
