"""Exception hierarchy shared by the estimation library, the WDI client and the pipeline."""


class ArdlKitError(Exception):
    """Base class for every error raised by ardl-kit."""


class DataValidationError(ArdlKitError, ValueError):
    """Input data, roles or parameters violate a documented precondition."""


class ConfigError(DataValidationError):
    """The study configuration file is malformed or holds invalid values."""


class SeriesMismatchError(DataValidationError):
    """Two results or samples that must describe the same data do not."""


class UnknownIndicatorError(DataValidationError):
    """The World Bank API does not know the requested indicator or country."""


class EstimationError(ArdlKitError):
    """A numerical step could not be completed."""


class RankDeficiencyError(EstimationError):
    """The design matrix is numerically rank deficient."""


class SampleTooShortError(EstimationError):
    """Too few observations remain for the requested regression."""


class DegenerateFitError(EstimationError):
    """Residual variance is zero where a statistic needs it to be positive."""


class SingularCovarianceError(EstimationError):
    """A long-run covariance block that must be inverted is singular."""


class CriticalValueError(ArdlKitError, LookupError):
    """No embedded critical value exists for the requested combination."""


class FetchError(ArdlKitError):
    """The World Bank API request failed or returned an unusable payload."""


class StageError(ArdlKitError):
    """A pipeline stage failed; carries the stage name and the original cause."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")
