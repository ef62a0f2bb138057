"""Exception hierarchy shared by all modules."""


class FewnomialError(Exception):
    """Base class for every error raised by this package."""


class InputError(FewnomialError, ValueError):
    """Malformed or inconsistent input data."""


class CertificationError(FewnomialError):
    """A certified computation could not be completed."""


# numeric_core
class NonPositiveBase(InputError):
    pass


class DomainError(InputError):
    pass


# univariate_roots
class EndpointRoot(FewnomialError):
    pass


class UnresolvedBox(CertificationError):
    """Subdivision hit its precision or depth cap without deciding a box."""


class NoSignChange(InputError):
    pass


# fewnomial_builder
class DegenerateLandmark(CertificationError):
    pass


class EmptyCInterval(CertificationError):
    pass


class CertificationFailed(CertificationError):
    pass


class LiftFailed(CertificationError):
    pass


# bivariate_certifier
class NoPositiveBranch(InputError):
    pass


class BudgetExceeded(CertificationError):
    pass


# gale_discriminant
class RankDeficient(InputError):
    pass


class NotAffinelyGenerating(InputError):
    pass


class ZeroCoordinate(InputError):
    pass


class ZeroU(InputError):
    pass


class OnArrangement(InputError):
    pass


# sheared_systems
class SignAmbiguous(InputError):
    pass


# chamber_counter
class NonGenericSupport(InputError):
    pass


class DegenerateFrame(CertificationError):
    pass
