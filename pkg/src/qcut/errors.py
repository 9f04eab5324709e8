"""Exception hierarchy shared by all modules."""


class QcutError(Exception):
    """Base class for all library errors."""


class DimMismatch(QcutError):
    pass


class ZeroVector(QcutError):
    pass


class NotSymmetric(QcutError):
    pass


class NoConvergence(QcutError):
    pass


class Singular(QcutError):
    pass


class DimensionCap(QcutError):
    pass


class DegenerateInterval(QcutError):
    pass


class ZeroNotInterior(QcutError):
    pass


class SliceOutsideBall(QcutError):
    pass


class UnsupportedCombination(QcutError):
    pass


class RecessionFailure(QcutError):
    pass


class BadWeights(QcutError):
    pass


class NotInside(QcutError):
    pass


class CutViolated(QcutError):
    pass


class UnsupportedFamily(QcutError):
    pass


class NotInForbidden(QcutError):
    pass


class BisectionFailure(QcutError):
    pass


class EmptySample(QcutError):
    pass


class DimUnsupported(QcutError):
    pass


class InputError(QcutError):
    """Malformed user input (CLI exit code 2)."""
