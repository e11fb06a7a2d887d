"""Exception hierarchy shared across the package."""


class LimitresError(Exception):
    """Base class for all errors raised by limitres."""


class MalformedWordError(LimitresError, ValueError):
    pass


class RankMismatchError(LimitresError, ValueError):
    pass


class ParseError(LimitresError, ValueError):
    """Syntax error in a text document, located by 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class DomainError(LimitresError, ValueError):
    pass


class DegenerateElementError(LimitresError, ValueError):
    """A matrix sits on (or too close to) the trace -2 locus."""

    def __init__(self, distance, delta):
        self.distance = distance
        self.delta = delta
        super().__init__(
            f"|trace + 2| = {distance:.3e} does not exceed the degeneracy threshold {delta:.1e}"
        )


class CertificationError(LimitresError):
    """A numeric certificate could not be produced."""


class CentralizerError(CertificationError):
    pass


class PreconditionError(LimitresError, ValueError):
    pass


class LatticeError(LimitresError, ValueError):
    pass
