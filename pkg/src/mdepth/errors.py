"""Exception hierarchy shared by all modules."""


class MDepthError(Exception):
    """Base class for data and numerical errors raised by :mod:`mdepth`."""


class InvalidData(MDepthError, ValueError):
    """Input data violates a structural requirement (shape, finiteness, rank)."""


class DegenerateDenominator(MDepthError, ArithmeticError):
    """All mass sits at the evaluation point and the loss has zero slope there."""


class NotConverged(MDepthError):
    """An iterative routine exhausted its iteration budget."""


class EmptyRegion(MDepthError):
    """An operation needing a non-empty region received an empty one."""


class OriginOutsideSupport(MDepthError, ValueError):
    pass


class ShapeMismatch(MDepthError, ValueError):
    pass


class PreconditionViolated(MDepthError, ValueError):
    pass


class RankDeficient(MDepthError, ValueError):
    pass


class InsufficientLocalData(MDepthError, ValueError):
    pass


class SeriesDiverged(MDepthError, ArithmeticError):
    pass
