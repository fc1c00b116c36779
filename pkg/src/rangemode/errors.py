"""Exception types raised by the range-mode package."""


class PreconditionError(ValueError):
    """Input violates a structural precondition of a query structure."""


class EntryRangeError(PreconditionError):
    """A finite matrix entry lies outside the allowed ``[-W, W]`` window."""


class BoundedDifferenceError(PreconditionError):
    def __init__(self, k, j1, j2, diff, bound):
        super().__init__(
            f"row {k}: |B[{k},{j1}] - B[{k},{j2}]| = {diff} exceeds W = {bound}"
        )
        self.k, self.j1, self.j2 = k, j1, j2


class MonotonicityError(PreconditionError):
    def __init__(self, k, j):
        super().__init__(f"row {k} increases at column {j}")
        self.k, self.j = k, j


class DropBoundError(PreconditionError):
    def __init__(self, j, drop, bound):
        super().__init__(
            f"column sums drop by {drop} between columns {j} and {j + 1} (bound {bound})"
        )
        self.j = j


class QueryBudgetError(PreconditionError):
    """Forbidden set too large for the structure's query budget ``L``."""


class CapacityError(PreconditionError):
    """Insertion would exceed the declared capacity ``N``."""
