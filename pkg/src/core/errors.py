"""
Error hierarchy for glupoly
Every refusal carries the exit code the CLI reports for it
"""

from typing import Iterable, List, Optional


class GlupolyError(Exception):
    """Base class for all refusals raised by the domain modules"""

    exit_code = 1


class InvalidArgumentError(GlupolyError):
    """An argument does not fit the object it is applied to"""

    exit_code = 2


class ValidationError(GlupolyError):
    """Gluing data failed validation"""

    exit_code = 2

    def __init__(self, report: Iterable[str]):
        self.report: List[str] = list(report)
        super().__init__("Invalid gluing data: " + "; ".join(self.report))


class UnknownCatalogEntryError(GlupolyError):
    exit_code = 2

    def __init__(self, name: str, known: Iterable[str]):
        self.name = name
        self.known = sorted(known)
        super().__init__(f"Unknown catalog entry '{name}'. Known: {', '.join(self.known)}")


class NotStableError(GlupolyError):
    """Operation needs stable (and sometimes expanding) gluing data"""

    exit_code = 2


class BudgetExceededError(GlupolyError):
    """A size budget (vertices, degree) would be exceeded"""

    exit_code = 3

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what} budget exceeded: {size} > {budget}")


class ChartBreakdownError(GlupolyError):
    """The (0)-coordinate is too small for the affine chart"""

    def __init__(self, modulus: float, threshold: float):
        self.modulus = modulus
        self.threshold = threshold
        super().__init__(f"Chart breakdown: |(0)| = {modulus:.3e} below {threshold:.3e}")


class IndeterminacyError(GlupolyError):
    """The projective map sends the point to (0, ..., 0)"""


class InsufficientDataError(GlupolyError):
    pass


class RootFindingError(GlupolyError):
    def __init__(self, message: str, stuck: Optional[Iterable[int]] = None):
        self.stuck = sorted(stuck or [])
        if self.stuck:
            message = f"{message} (stuck indices: {self.stuck})"
        super().__init__(message)


class InexactDivisionError(GlupolyError):
    """Per-term division by a power of lambda left a remainder"""


class InternalError(GlupolyError):
    pass
