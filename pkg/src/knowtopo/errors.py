"""Exception hierarchy for knowtopo."""


class KnowTopoError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveWeight(KnowTopoError, ValueError):
    pass


class SelfLoop(KnowTopoError, ValueError):
    pass


class EmptySelection(KnowTopoError):
    pass


class DimensionCapTooLarge(KnowTopoError):
    """Clique enumeration exceeded the configured cell budget."""

    def __init__(self, budget: int, reached: int):
        super().__init__(
            f"flag complex enumeration exceeded cell budget {budget} "
            f"(reached {reached} cells)"
        )
        self.budget = budget
        self.reached = reached


class CapViolation(KnowTopoError, ValueError):
    pass


class OracleTooLarge(KnowTopoError):
    pass


class DimensionUnavailable(KnowTopoError, ValueError):
    pass


class TooFewDiagrams(KnowTopoError, ValueError):
    pass


class InfeasibleEdgeCount(KnowTopoError, ValueError):
    pass


class TooFewSamples(KnowTopoError, ValueError):
    pass


class LengthMismatch(KnowTopoError, ValueError):
    pass


class DegenerateInput(KnowTopoError, ValueError):
    pass


class ConfigInvalid(KnowTopoError, ValueError):
    pass


class InputUnreadable(KnowTopoError, OSError):
    pass
