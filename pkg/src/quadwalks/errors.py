"""Exception hierarchy.

Every error raised for bad input or an undefined mathematical situation
derives from :class:`DomainError`, which the command line maps to exit
code 2.  Anything else is treated as an internal failure.
"""


class DomainError(ValueError):
    """Base class for input and domain errors."""


class InvalidStep(DomainError):
    pass


class WeightOutOfRange(DomainError):
    pass


class SingularWalk(DomainError):
    pass


class OnCut(DomainError):
    pass


class OffCurve(DomainError):
    pass


class NotOnCurve(OffCurve):
    pass


class OutsideCertifiedRegion(DomainError):
    pass


class ModulusOutOfRange(DomainError):
    pass


class ArgumentOutOfRange(DomainError):
    pass


class QuadratureFailure(DomainError):
    pass


class LatticePole(DomainError):
    pass


class DegenerateMap(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class SeedDegenerate(DomainError):
    pass


class InfiniteGroup(DomainError):
    pass


class FitUnstable(DomainError):
    pass


class OutsideSeedDomain(DomainError):
    pass


class NearPole(DomainError):
    """An increment of the continuation sum blew up.

    Attributes
    ----------
    omega : complex
        Point at which the offending increment was evaluated.
    """

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class NoPreimageInCell(DomainError):
    pass


class KernelZero(DomainError):
    pass


class SignatureMismatch(DomainError):
    pass


class RationalRatio(DomainError):
    pass
