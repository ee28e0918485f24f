"""Exception and warning types shared across the package."""


class QgsError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(QgsError):
    pass


class SingularMatrix(QgsError):
    pass


class ConvergenceFailure(QgsError):
    pass


class NotSelfAdjoint(QgsError):
    def __init__(self, report):
        super().__init__(f"boundary conditions are not self-adjoint: {report}")
        self.report = report


class NoChannels(QgsError):
    pass


class ExceptionalPoint(QgsError):
    pass


class RankDeficientBlock(QgsError):
    pass


class DegenerateTransfer(QgsError):
    pass


class DomainViolation(QgsError):
    pass


class PortCollision(QgsError):
    pass


class IndexOutOfRange(QgsError):
    pass


class IllConditionedWarning(UserWarning):
    """Emitted when a star product is formally compatible but nearly singular."""
