"""Domain exceptions.

The CLI maps QuiverLabError (and subclasses) to exit code 1; anything else
is a genuine bug and propagates.
"""


class QuiverLabError(Exception):
    """Base class for expected domain failures."""


class InvalidQuiver(QuiverLabError):
    """Doubling, involution or sign structure of a quiver is broken."""


class ShapeMismatch(QuiverLabError):
    """Matrix or vector dimensions are incompatible."""


class WrongField(QuiverLabError):
    """Operands live over different fields, or the operation needs another field."""


class NotSquare(QuiverLabError):
    pass


class NoSolution(QuiverLabError):
    """Linear system is inconsistent."""


class SingularMatrix(QuiverLabError):
    pass


class NotFiniteType(QuiverLabError):
    """Cartan matrix is not positive definite; Weyl enumeration would not stop."""


class SingularBlock(QuiverLabError):
    """A group element block is not invertible."""


class FiberSampleFailed(QuiverLabError):
    """Random sampling of a moment fiber exhausted its retry budget."""


class BalanceViolated(QuiverLabError):
    """Chi-data row/column dimension bookkeeping does not balance."""


class ReflectionUndefined(QuiverLabError):
    """Neither kernel nor cokernel construction applies at this vertex."""


class MomentMismatch(QuiverLabError):
    """Point does not satisfy the required moment equation exactly."""


class RankTooLarge(QuiverLabError):
    """Projection step needs a rank drop that is not there."""


class BudgetExceeded(QuiverLabError):
    """Enumeration would exceed the configured budget."""


class RangeViolation(QuiverLabError):
    """A dimension vector argument is outside its allowed range."""
