"""Exception hierarchy shared by every module of the library."""


class SesquiError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SesquiError, ValueError):
    """Operands have incompatible shapes or live over different algebras."""


class NotInvertibleError(SesquiError, ValueError):
    """An operation required an invertible matrix and got a singular one."""


class InfiniteBaseError(SesquiError, ValueError):
    """An enumeration or brute-force search was asked for over an infinite field."""


class EvenDegreeError(SesquiError, ValueError):
    """An odd-degree field extension was required."""


class BudgetExceededError(SesquiError, RuntimeError):
    """A search would exceed (or has exceeded) its operation budget.

    ``estimate`` holds the number of elementary operations the computation
    would need (or had consumed when it was interrupted).
    """

    def __init__(self, estimate, limit=None):
        self.estimate = estimate
        self.limit = limit
        msg = f"operation budget exceeded: need about {estimate} elementary operations"
        if limit is not None:
            msg += f" (limit {limit})"
        super().__init__(msg)
