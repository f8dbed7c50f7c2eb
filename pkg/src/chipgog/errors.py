"""Exception hierarchy.

Errors fall in two families: input problems (bad files, invalid graphs or
actions) and internal consistency failures. The latter guard identities that
are theorems, so raising one means there is a bug in this package.
"""


class ChipGogError(Exception):
    """Base class for all package errors."""


class InputError(ChipGogError):
    """The caller supplied something malformed."""


class ConsistencyError(ChipGogError, AssertionError):
    """An identity that must hold by theory failed to hold."""


class ParseError(InputError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class InvalidGraph(InputError):
    pass


class DisconnectedGraph(InputError):
    pass


class UnknownVertex(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotAMorphism(InputError):
    pass


class NotHarmonic(InputError):
    """Raised with a witness ``(vertex, h1, h2)`` of unequal fiber counts."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class NotAnAction(InputError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ClosureCapExceeded(InputError):
    pass


class InvalidVoltage(InputError):
    pass


class IncompatibleSubgroups(InputError):
    pass


class DivisibilityViolation(InputError):
    pass


class NotOrderTwo(InputError):
    pass


class NotASublattice(InputError):
    pass


class RankMismatch(InputError):
    pass


class TreeInput(InputError):
    """The zeta leading-coefficient clause is vacuous for trees."""


class MismatchedAdjugate(ConsistencyError):
    pass


class NonIntegerOrder(ConsistencyError):
    pass


class LeadingCoeffMismatch(ConsistencyError):
    pass


class PresentationSolveFailure(ConsistencyError):
    pass


class OrderIdentityViolation(ConsistencyError):
    pass


class InternalMismatch(ConsistencyError):
    pass


class MismatchReport(ConsistencyError):
    pass
