"""Error types raised by the engine.

Validators never raise for mathematical failures; they return reports.
The exceptions below signal unusable input or impossible requests.
"""


class AinfError(Exception):
    """Base class for every error raised by this package."""


class NotUnipotent(AinfError):
    pass


class NotNilpotent(AinfError):
    pass


class InvalidGenerator(AinfError):
    pass


class MonoidMismatch(AinfError):
    pass


class CutoffExceeded(AinfError):
    pass


class NotADifferential(AinfError):
    pass


class NotAssociative(AinfError):
    pass


class LeibnizFailure(AinfError):
    pass


class NotAField(AinfError):
    pass


class StructureMismatch(AinfError):
    pass


class NotInvertible(AinfError):
    pass


class NoOrthogonalComplement(AinfError):
    pass


class CorrectionDiverged(AinfError):
    pass


class NotAHomotopy(AinfError):
    pass


class NotAPerturbation(AinfError):
    pass


class SideConditionsMissing(AinfError):
    pass


class NotInvariantClosed(AinfError):
    pass


class NotInvariant(AinfError):
    pass


class LiftObstructed(AinfError):
    def __init__(self, message: str, degree=None):
        super().__init__(message)
        self.degree = degree


class UnknownFixture(AinfError):
    pass


class ParseError(AinfError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += source
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.source = source
