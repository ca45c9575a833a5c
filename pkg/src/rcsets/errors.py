"""Exception types raised across the package."""


class CodeTooShort(ValueError):
    """A code ran out before the requested depth was resolved.

    ``missing`` is a lower bound on the number of further symbols needed.
    """

    def __init__(self, missing: int, depth: int, level: int):
        self.missing = missing
        self.depth = depth
        self.level = level
        super().__init__(
            f"code exhausted at level {level} of {depth}; "
            f"at least {missing} more symbol(s) required"
        )


class DeadEndPresent(ValueError):
    """A tree handed to the trit encoder has a childless internal node."""


class LevelOutOfRange(ValueError):
    pass


class InvalidParameters(ValueError):
    pass


class InvalidSurvival(InvalidParameters):
    pass


class DomainError(ValueError):
    """An argument lies outside the range where a formula is defined."""


class DegenerateLaw(ValueError):
    pass


class SubcriticalLaw(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, level: int, nodes: int, budget: int):
        self.level = level
        self.nodes = nodes
        self.budget = budget
        super().__init__(
            f"node budget {budget} exceeded at level {level} ({nodes} nodes)"
        )


class Extinct(Exception):
    """The tree has no node at its horizon, so pruning leaves nothing."""


class InputTooShort(ValueError):
    pass


class InsufficientSurvivors(RuntimeError):
    pass
