"""Operation budgets for the brute-force searches.

One budget unit is one "elementary matrix operation": a candidate tested in a
unit sweep, one Gram transform, one form evaluation, or similar.  Budgets make
the exhaustive oracles refuse work that cannot finish at desk scale instead of
hanging; the refusal carries a size estimate.
"""

from __future__ import annotations

from .errors import BudgetExceededError

#: default number of elementary operations a CLI command may spend
DEFAULT_LIMIT = 10**7


class Budget:
    """Mutable countdown of elementary operations.

    A ``Budget`` may be shared by the sub-steps of one command; it is not
    thread-safe and is meant to be confined to a single logical computation.
    ``Budget(None)`` never trips.
    """

    __slots__ = ("limit", "spent")

    def __init__(self, limit: int | None = DEFAULT_LIMIT):
        self.limit = limit
        self.spent = 0

    def charge(self, n: int = 1) -> None:
        self.spent += n
        if self.limit is not None and self.spent > self.limit:
            raise BudgetExceededError(self.spent, self.limit)

    def check_estimate(self, estimate: int) -> None:
        """Refuse up front when a sweep of ``estimate`` operations cannot fit."""
        if self.limit is not None and self.spent + estimate > self.limit:
            raise BudgetExceededError(estimate, self.limit)

    @property
    def remaining(self) -> int | None:
        if self.limit is None:
            return None
        return max(self.limit - self.spent, 0)


def ensure_budget(budget: Budget | None) -> Budget:
    """Normalize an optional budget argument; ``None`` means unlimited."""
    return budget if budget is not None else Budget(None)
