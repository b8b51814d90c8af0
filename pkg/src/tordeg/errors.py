"""Exception hierarchy shared by every module."""


class TordegError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(TordegError):
    pass


class DegenerateInput(TordegError):
    pass


class NotInvertibleOverZ(TordegError):
    pass


class UnsupportedDimension(TordegError):
    pass


class InvalidVertex(TordegError):
    pass


class NotStronglyConvex(TordegError):
    pass


class IncompleteFan(TordegError):
    pass


class NotConvex(TordegError):
    pass


class FanStructureMismatch(TordegError):
    pass


class NotAManifold(TordegError):
    pass


class AmbiguousTransition(TordegError):
    pass


class MalformedPath(TordegError):
    pass


class NotALoop(MalformedPath):
    pass


class NotToricDecomposition(TordegError):
    pass


class DimensionDefect(TordegError):
    pass


class NotReducedAlongDivisor(TordegError):
    pass


class SpecError(TordegError):
    """Malformed degeneration / complex input data."""


class UnknownFixture(TordegError):
    pass
