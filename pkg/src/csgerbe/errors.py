"""Exception types raised by the engine."""


class GerbeError(Exception):
    """Base class for all engine errors."""


class InvalidInput(GerbeError, ValueError):
    """Shapes, grids or group data that do not fit together."""


class GridTooCoarse(InvalidInput):
    pass


class InvalidSpace(InvalidInput):
    """A form or map was handed a point of the wrong space."""


class InvalidDegree(InvalidInput):
    pass


class UnsupportedDegree(GerbeError, NotImplementedError):
    pass


class UnknownMap(GerbeError, KeyError):
    pass


class UnknownCheck(GerbeError, KeyError):
    pass
