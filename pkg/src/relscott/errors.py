"""Exception hierarchy.

Validation failures map to CLI exit code 2, numerical failures to exit code 3.
"""


class RelScottError(Exception):
    pass


class ValidationError(RelScottError):
    exit_code = 2


class SubcriticalityViolation(ValidationError):
    pass


class CouplingViolation(ValidationError):
    pass


class GeometryViolation(ValidationError):
    pass


class GammaOutOfRange(ValidationError):
    pass


class GammaSupercritical(ValidationError):
    pass


class RegimeViolation(ValidationError):
    pass


class PreconditionViolation(ValidationError):
    pass


class MissingScottEntry(ValidationError):
    pass


class CoefficientUnset(ValidationError):
    pass


class NumericalError(RelScottError):
    exit_code = 3


class NoConvergence(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class EigendecompositionFailure(NumericalError):
    pass


class GapViolation(NumericalError):
    pass


class LineSearchFailure(NumericalError):
    pass


class NotConverged(NumericalError):
    pass
