"""Exception hierarchy.

Each family maps onto one CLI exit code (see :mod:`popp.cli`).
"""


class PoppError(Exception):
    exit_code = 1


class ValidationError(PoppError, ValueError):
    """Malformed input: bad dimensions, unparsable polynomial, invalid file."""

    exit_code = 2


class PolyParseError(ValidationError):
    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if text is not None and pos is not None:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)


class TermCapExceeded(PoppError):
    """A polynomial operation would produce more terms than allowed."""


class SingularPointError(PoppError):
    """The query point is singular or too close to a singular locus."""

    exit_code = 3


class RankDeficientHorizontal(SingularPointError):
    def __init__(self, point, rank, k):
        self.point = tuple(point)
        self.rank = rank
        super().__init__(
            f"horizontal fields have numerical rank {rank} < {k} at {self.point}")


class NotBracketGenerating(SingularPointError):
    def __init__(self, point, stalled_rank, n):
        self.point = tuple(point)
        self.stalled_rank = stalled_rank
        super().__init__(
            f"brackets stall at rank {stalled_rank} < {n} at {self.point}")


class InternalInconsistency(PoppError):
    """Residual or positivity checks failed where theory says they cannot."""

    exit_code = 4
