"""Exception hierarchy shared by all modules."""


class VortexError(Exception):
    """Base class for every error raised by vortexsym."""


class PoleError(VortexError, ValueError):
    pass


class NonFiniteError(VortexError, ArithmeticError):
    pass


class UnsupportedGroup(VortexError, ValueError):
    pass


class NotInvariant(VortexError, ValueError):
    """A fixed-point list is not closed under the group action."""


class NotInFixedSet(VortexError, ValueError):
    """A fixed point has trivial isotropy."""


class CollisionError(VortexError, ValueError):
    """Evaluation requested at (or numerically at) a collision."""


class ToleranceError(VortexError, RuntimeError):
    """Adaptive step size underflowed."""


class UnsupportedDegree(VortexError, ValueError):
    pass


class NoBracket(VortexError, ValueError):
    pass


class MultipleRoots(VortexError, ValueError):
    pass


class DegenerateHessian(VortexError, ArithmeticError):
    pass


class NoReturn(VortexError, RuntimeError):
    """No return to the Poincare section within the time budget."""


class NotRegular(VortexError, ValueError):
    """Initial point sits on (or too close to) a critical point."""


class EnergyUnreachable(VortexError, RuntimeError):
    pass


class ResidualTooLarge(VortexError, RuntimeError):
    pass
