"""Exception hierarchy shared by all modules."""


class QSzilardError(Exception):
    """Base class for every error raised by the package."""


class DomainError(QSzilardError, ValueError):
    """An argument lies outside the domain of the operation."""


class SumUnderflow(QSzilardError, ArithmeticError):
    """The partition sum underflows as a raw double (beta * E_1 too large)."""


class TruncationError(QSzilardError, ArithmeticError):
    """Series did not reach the requested tolerance within the term cap."""


class PositivityError(DomainError):
    """Demon density matrix would not be positive semidefinite."""


class DegenerateGap(DomainError):
    """Effective temperature requested for a degenerate (zero-gap) demon."""


class CrushedBlock(QSzilardError):
    """A block with finite weight was compressed to zero width."""


class NoSignChange(QSzilardError):
    """The search bracket does not straddle a root."""


class BoundaryMaximum(QSzilardError):
    """The maximum of the objective sits on the edge of the bracket."""
