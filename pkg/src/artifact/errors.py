"""Exception types shared by the numerical modules."""


class ArtifactError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 3


class ConfigError(ArtifactError):
    exit_code = 2


# special functions
class RegimeUnsupported(ArtifactError):
    pass


class DomainError(ArtifactError):
    pass


class OutsideRegion(ArtifactError):
    pass


class OutsideRegionWarning(UserWarning):
    pass


class BranchAmbiguity(ArtifactError):
    pass


# root finding
class NoConvergence(ArtifactError):
    pass


class EscapedBall(ArtifactError):
    pass


class PoleProximity(ArtifactError):
    pass


class WindowInvalid(ConfigError):
    pass


class MixedParameter(ArtifactError):
    pass


class OracleTooLarge(ArtifactError):
    pass


class OracleMismatch(ArtifactError):
    exit_code = 4


class HypothesisViolated(ArtifactError):
    pass
