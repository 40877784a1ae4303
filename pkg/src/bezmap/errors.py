"""Exception types raised by bezmap.

All of them derive from :class:`BezmapError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class BezmapError(ValueError):
    pass


class DomainError(BezmapError):
    """Argument outside the mathematical domain of an operation."""


class UnderdeterminedError(BezmapError):
    """Fewer samples than unknowns in a least-squares problem."""


class ShapeError(BezmapError):
    """Array or sequence lengths do not agree."""


class DegenerateError(BezmapError):
    """Input collapses (zero length, empty set) where extent is required."""


class CapacityError(BezmapError):
    """Ground-truth generation needed more pieces than allowed."""


class ToleranceError(BezmapError):
    """Even the shortest span could not be fitted below tolerance."""


class ConfigurationError(BezmapError):
    pass


class BehindCameraError(BezmapError):
    pass


class ParseError(BezmapError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class SchemaVersionError(ParseError):
    pass
