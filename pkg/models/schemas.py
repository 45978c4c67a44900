from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional, Tuple, Union
from enum import Enum
from datetime import datetime, timezone
from pathlib import Path
import math

import numpy as np
import pandas as pd

SIGNIFICANCE_LEVELS = ("1%", "5%", "10%")
BOUNDS_LEVELS = ("10%", "5%", "2.5%", "1%")


def normalize_level(level: Union[str, float, int]) -> str:
    """Canonical significance label: "5%", 0.05 and 5 all map to "5%"."""
    if isinstance(level, str):
        text = level.strip()
        try:
            value = float(text.rstrip("%"))
        except ValueError:
            raise ValueError(f"Invalid significance level: {level!r}")
        if not text.endswith("%") and value < 1:
            value *= 100
    else:
        value = float(level)
        if value < 1:
            value *= 100
    return f"{round(value, 4):g}%"


class PipelineStage(str, Enum):
    INGEST = "ingest"
    DESCRIBE = "describe"
    UNIT_ROOT = "unit_root"
    BOUNDS = "bounds"
    ECM = "ecm"
    ROBUSTNESS = "robustness"
    REPORT = "report"


class DeterministicSpec(str, Enum):
    CONSTANT = "constant"
    CONSTANT_TREND = "constant_trend"


class IntegrationOrder(str, Enum):
    I0 = "I(0)"
    I1 = "I(1)"
    HIGHER = "higher"


class Criterion(str, Enum):
    AIC = "aic"
    SIC = "sic"
    HQ = "hq"


class BoundsDecision(str, Enum):
    COINTEGRATED = "cointegrated"
    NOT_COINTEGRATED = "not_cointegrated"
    INCONCLUSIVE = "inconclusive"


class StabilityVerdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class CointMethod(str, Enum):
    FMOLS = "FMOLS"
    CCR = "CCR"


class BlockStatus(str, Enum):
    COMPLETED = "completed"
    SKIPPED = "skipped"
    FAILED = "failed"


# Base classes: immutable records, and immutable records that carry numpy arrays
class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


class NumericModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ---------------------------------------------------------------- time series

class TimeSeries(FrozenModel):
    name: str = Field(..., min_length=1, description="Series symbol, e.g. UNP")
    start_year: int = Field(..., description="Calendar year of the first observation")
    values: Tuple[float, ...] = Field(..., min_length=1, description="Annual observations in year order")

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, v):
        if isinstance(v, (np.ndarray, pd.Series)):
            return tuple(float(x) for x in np.asarray(v, dtype=float).ravel())
        return v

    @field_validator("values")
    @classmethod
    def validate_finite(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError("Series values must be finite (no missing entries)")
        return v

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> List[int]:
        return list(range(self.start_year, self.end_year + 1))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_pandas(self) -> pd.Series:
        return pd.Series(self.values, index=pd.Index(self.years, name="year"), name=self.name)


class DatasetRoles(FrozenModel):
    dependent: str = Field(..., min_length=1, description="Dependent variable symbol")
    regressors: Tuple[str, ...] = Field(..., min_length=1, description="Regressor symbols in model order")

    @model_validator(mode="after")
    def validate_roles(self):
        if self.dependent in self.regressors:
            raise ValueError(f"Dependent variable '{self.dependent}' cannot also be a regressor")
        if len(set(self.regressors)) != len(self.regressors):
            raise ValueError("Regressor names must be unique")
        return self


class Dataset(FrozenModel):
    series: Dict[str, TimeSeries] = Field(..., min_length=1, description="symbol -> series")
    roles: DatasetRoles

    @model_validator(mode="after")
    def validate_alignment(self):
        first = next(iter(self.series.values()))
        for key, s in self.series.items():
            if key != s.name:
                raise ValueError(f"Series key '{key}' does not match series name '{s.name}'")
            if s.start_year != first.start_year or len(s) != len(first):
                raise ValueError(
                    f"Series '{s.name}' covers {s.start_year}-{s.end_year}, "
                    f"expected {first.start_year}-{first.end_year}"
                )
        for name in (self.roles.dependent, *self.roles.regressors):
            if name not in self.series:
                raise ValueError(f"Role '{name}' does not resolve to a series")
        return self

    @property
    def start_year(self) -> int:
        return next(iter(self.series.values())).start_year

    @property
    def length(self) -> int:
        return len(next(iter(self.series.values())))

    @property
    def dependent(self) -> TimeSeries:
        return self.series[self.roles.dependent]

    @property
    def regressors(self) -> List[TimeSeries]:
        return [self.series[name] for name in self.roles.regressors]

    @property
    def model_names(self) -> List[str]:
        return [self.roles.dependent, *self.roles.regressors]

    def with_roles(self, dependent: str, regressors) -> "Dataset":
        return Dataset(series=self.series, roles=DatasetRoles(dependent=dependent, regressors=tuple(regressors)))

    def to_frame(self) -> pd.DataFrame:
        return pd.concat([s.to_pandas() for s in self.series.values()], axis=1)


class DescriptiveStats(FrozenModel):
    name: str
    obs: int = Field(..., ge=2)
    mean: float
    std: float = Field(..., ge=0.0, description="Sample standard deviation (n-1 denominator)")
    min: float
    max: float


# ------------------------------------------------------------------ regression

class HacOptions(FrozenModel):
    kernel: Literal["bartlett"] = "bartlett"
    bandwidth: Union[int, Literal["automatic"]] = "automatic"

    @field_validator("bandwidth")
    @classmethod
    def validate_bandwidth(cls, v):
        if isinstance(v, int) and v < 0:
            raise ValueError("Bandwidth must be a nonnegative integer or 'automatic'")
        return v

    def resolve(self, nobs: int) -> int:
        """Integer bandwidth for a sample of `nobs` observations."""
        if self.bandwidth == "automatic":
            return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))
        return int(self.bandwidth)


class RegressionFit(NumericModel):
    coefficients: np.ndarray
    covariance: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    y: np.ndarray
    design: np.ndarray
    names: Tuple[str, ...]
    rss: float = Field(..., ge=0.0)
    tss: float = Field(..., ge=0.0, description="Total sum of squares about the mean of y")
    n_obs: int
    n_params: int
    exact_fit: bool = False
    cov_type: str = "classical"

    @property
    def df_resid(self) -> int:
        return self.n_obs - self.n_params

    @property
    def sigma2(self) -> float:
        return self.rss / self.n_obs

    @property
    def log_sigma2(self) -> float:
        """ln(RSS/T), the scale term shared by every information criterion."""
        return math.log(self.sigma2) if self.rss > 0 else -math.inf

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def t_stats(self) -> np.ndarray:
        se = self.std_errors
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(se > 0, self.coefficients / np.where(se > 0, se, 1.0), np.nan)

    @property
    def r_squared(self) -> float:
        return 1.0 - self.rss / self.tss if self.tss > 0 else 0.0

    @property
    def adj_r_squared(self) -> float:
        if self.tss <= 0:
            return 0.0
        return 1.0 - (self.rss / self.df_resid) / (self.tss / (self.n_obs - 1))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"No regressor named '{name}' in fit")

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.index(name)])


class InformationCriteria(FrozenModel):
    aic: float
    sic: float
    hq: float
    exact_fit: bool = False

    def get(self, criterion: Union["Criterion", str]) -> float:
        return getattr(self, Criterion(criterion).value)


class FTestResult(FrozenModel):
    statistic: float = Field(..., ge=0.0)
    p_value: float = Field(..., ge=0.0, le=1.0)
    df_num: int
    df_den: int


# ------------------------------------------------------------------ unit roots

class UnitRootResult(FrozenModel):
    test: Literal["ADF", "PP"]
    series: str
    tau: float
    lag_or_bandwidth: int = Field(..., ge=0)
    spec: DeterministicSpec
    critical_values: Dict[str, float]
    reject: Dict[str, bool]
    n_obs: int
    criterion: Optional[Criterion] = None

    @model_validator(mode="after")
    def validate_decisions(self):
        cvs = [self.critical_values[level] for level in SIGNIFICANCE_LEVELS]
        if not (cvs[0] < cvs[1] < cvs[2]):
            raise ValueError("Critical values must increase from 1% to 10%")
        for level in SIGNIFICANCE_LEVELS:
            if self.reject[level] != (self.tau < self.critical_values[level]):
                raise ValueError(f"Rejection flag at {level} inconsistent with tau")
        return self

    @property
    def stars(self) -> str:
        return significance_stars({level: self.reject[level] for level in SIGNIFICANCE_LEVELS})


def significance_stars(flags: Dict[str, bool]) -> str:
    """*** for 1%, ** for 5%, * for 10%."""
    if flags.get("1%"):
        return "***"
    if flags.get("5%"):
        return "**"
    if flags.get("10%"):
        return "*"
    return ""


# ------------------------------------------------------------------------ ARDL

class ArdlSpec(FrozenModel):
    dep: str
    regressors: Tuple[str, ...] = Field(..., min_length=1)
    lags: Tuple[int, ...] = Field(..., description="(p, q1, ..., qk)")
    deterministic: Literal["constant"] = "constant"
    criterion: Criterion = Criterion.AIC
    criterion_value: Optional[float] = None
    candidates_evaluated: Optional[int] = None

    @model_validator(mode="after")
    def validate_lags(self):
        if len(self.lags) != len(self.regressors) + 1:
            raise ValueError("Lag vector must hold p followed by one q per regressor")
        if self.lags[0] < 1:
            raise ValueError("Autoregressive order p must be at least 1")
        if any(q < 0 for q in self.lags[1:]):
            raise ValueError("Distributed-lag orders must be nonnegative")
        return self

    @property
    def p(self) -> int:
        return self.lags[0]

    @property
    def q(self) -> Dict[str, int]:
        return dict(zip(self.regressors, self.lags[1:]))

    @property
    def max_lag(self) -> int:
        return max(self.lags)

    @property
    def label(self) -> str:
        return "(" + ", ".join(str(v) for v in self.lags) + ")"


class BoundsResult(FrozenModel):
    f_stat: float = Field(..., ge=0.0)
    k: int = Field(..., ge=1)
    case: Literal["II", "III"] = "II"
    bounds: Dict[str, Tuple[float, float]]
    decision: Dict[str, BoundsDecision]
    lags: Tuple[int, ...]
    n_obs: int
    rss_restricted: float
    rss_unrestricted: float

    @model_validator(mode="after")
    def validate_bounds(self):
        for level, (lower, upper) in self.bounds.items():
            if not lower < upper:
                raise ValueError(f"I(0) bound must be below I(1) bound at {level}")
        return self

    @property
    def stars(self) -> str:
        return significance_stars(
            {level: self.decision.get(level) == BoundsDecision.COINTEGRATED for level in SIGNIFICANCE_LEVELS}
        )


class Coefficient(FrozenModel):
    name: str
    coefficient: float
    std_error: float
    t_stat: float
    p_value: Optional[float] = None


class EcmFit(NumericModel):
    spec: ArdlSpec
    short_run: Tuple[Coefficient, ...]
    ect: Coefficient
    long_run: Tuple[Coefficient, ...]
    ecm_terms: Tuple[Coefficient, ...]
    levels_fit: RegressionFit
    ecm_fit: RegressionFit
    ar_root_moduli: Tuple[float, ...]
    stable: bool
    warnings: Tuple[str, ...] = ()


# ----------------------------------------------------------------- diagnostics

class TestResult(FrozenModel):
    __test__ = False

    name: str
    statistic: float
    df: Tuple[int, ...]
    p_value: float = Field(..., ge=0.0, le=1.0)
    distribution: Literal["chi2", "f"] = "chi2"
    variant: str = ""


class StabilityPath(FrozenModel):
    name: Literal["CUSUM", "CUSUMSQ"]
    times: Tuple[int, ...]
    statistic: Tuple[float, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    verdict: StabilityVerdict
    level: str = "5%"

    @model_validator(mode="after")
    def validate_verdict(self):
        inside = all(lo < s < hi for s, lo, hi in zip(self.statistic, self.lower, self.upper))
        expected = StabilityVerdict.STABLE if inside else StabilityVerdict.UNSTABLE
        if self.verdict != expected:
            raise ValueError("Verdict inconsistent with path and bounds")
        return self


# ------------------------------------------------------- cointegrating regression

class LongRunCov(NumericModel):
    omega: np.ndarray = Field(..., description="Two-sided long-run covariance of [u, dx]")
    lambda_: np.ndarray = Field(..., description="One-sided long-run covariance, lag 0 included")
    sigma: np.ndarray = Field(..., description="Contemporaneous covariance (lag-0 term)")
    bandwidth: int

    @property
    def omega_11(self) -> float:
        return float(self.omega[0, 0])

    @property
    def omega_12(self) -> np.ndarray:
        return self.omega[:1, 1:]

    @property
    def omega_22(self) -> np.ndarray:
        return self.omega[1:, 1:]

    @property
    def lambda_12(self) -> np.ndarray:
        return self.lambda_[:1, 1:]

    @property
    def lambda_22(self) -> np.ndarray:
        return self.lambda_[1:, 1:]


class CointRegFit(NumericModel):
    method: CointMethod
    names: Tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    covariance: np.ndarray
    bandwidth: int
    n_obs: int
    omega_112: float
    r_squared: float
    degenerate: bool = False
    warnings: Tuple[str, ...] = ()

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])


# ------------------------------------------------------------ pipeline config

class PipelineConfig(FrozenModel):
    source: Literal["csv", "wdi"] = "csv"
    data_csv: Optional[Path] = None
    wdi_indicators: Dict[str, str] = Field(default_factory=dict, description="series name -> WDI code")
    wdi_country: Optional[str] = None
    wdi_from: Optional[int] = None
    wdi_to: Optional[int] = None
    wdi_fixtures: Optional[Path] = None
    dependent: str
    regressors: Tuple[str, ...] = Field(..., min_length=1)
    max_p: int = Field(2, ge=1)
    max_q: int = Field(2, ge=0)
    criterion: Criterion = Criterion.AIC
    significance: Literal["1%", "5%", "10%"] = "5%"
    bandwidth: Union[int, Literal["automatic"]] = "automatic"
    adf_max_lag: Union[int, Literal["auto"]] = "auto"
    bg_lags: int = Field(2, ge=1)
    reset_powers: Tuple[int, ...] = (2,)
    bounds_case: Literal["II", "III"] = "II"
    workers: int = Field(1, ge=1)
    output_dir: Path = Path("output")
    formats: Tuple[Literal["text", "json"], ...] = ("text", "json")

    @model_validator(mode="after")
    def validate_source(self):
        if self.source == "csv":
            if self.data_csv is None:
                raise ValueError("source = csv requires data_csv")
            if self.wdi_indicators:
                raise ValueError("wdi_indicators given but source = csv; choose exactly one primary source")
        else:
            missing = [k for k in ("wdi_country", "wdi_from", "wdi_to") if getattr(self, k) is None]
            if not self.wdi_indicators or missing:
                raise ValueError(f"source = wdi requires wdi_indicators and {', '.join(missing) or 'indicators'}")
            if self.wdi_from > self.wdi_to:
                raise ValueError("wdi_from must not exceed wdi_to")
        if self.dependent in self.regressors:
            raise ValueError("dependent must not be listed among regressors")
        if any(p < 2 for p in self.reset_powers):
            raise ValueError("reset_powers must be integers >= 2")
        return self

    @property
    def hac(self) -> HacOptions:
        return HacOptions(bandwidth=self.bandwidth)


# --------------------------------------------------------------------- report

def finite_or_none(value) -> Optional[float]:
    """JSON has no NaN; undefined cells are stored as null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class StatCell(FrozenModel):
    value: Optional[float] = None
    lag: Optional[int] = None
    stars: str = ""


class DescriptiveRow(FrozenModel):
    symbol: str
    obs: int
    mean: float
    std: float
    min: float
    max: float


class UnitRootRow(FrozenModel):
    variable: str
    spec: DeterministicSpec
    adf_level: StatCell
    adf_diff: StatCell
    pp_level: StatCell
    pp_diff: StatCell
    status: IntegrationOrder


class CoefficientRow(FrozenModel):
    name: str
    coefficient: Optional[float] = None
    std_error: Optional[float] = None
    t_stat: Optional[float] = None
    p_value: Optional[float] = None
    stars: str = ""

    @classmethod
    def from_estimate(cls, name: str, coefficient, std_error, t_stat, p_value=None) -> "CoefficientRow":
        p = finite_or_none(p_value)
        return cls(
            name=name,
            coefficient=finite_or_none(coefficient),
            std_error=finite_or_none(std_error),
            t_stat=finite_or_none(t_stat),
            p_value=p,
            stars="" if p is None else significance_stars({"1%": p < 0.01, "5%": p < 0.05, "10%": p < 0.10}),
        )


class DiagnosticRow(FrozenModel):
    name: str
    statistic: Optional[float] = None
    df: List[int] = Field(default_factory=list)
    p_value: Optional[float] = None
    variant: str = ""


class StabilityRow(FrozenModel):
    name: str
    verdict: StabilityVerdict


class BlockBase(FrozenModel):
    status: BlockStatus = BlockStatus.COMPLETED
    reason: Optional[str] = None


class DescriptiveBlock(BlockBase):
    rows: List[DescriptiveRow] = Field(default_factory=list)


class UnitRootBlock(BlockBase):
    significance: str = "5%"
    rows: List[UnitRootRow] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class BoundsBlock(BlockBase):
    model: str = ""
    criterion: Optional[Criterion] = None
    lags: List[int] = Field(default_factory=list)
    f_stat: Optional[float] = None
    stars: str = ""
    k: Optional[int] = None
    case: Optional[str] = None
    bounds: Dict[str, List[float]] = Field(default_factory=dict)
    decision: Dict[str, BoundsDecision] = Field(default_factory=dict)
    significance: str = "5%"


class EcmBlock(BlockBase):
    dependent: str = ""
    short_run: List[CoefficientRow] = Field(default_factory=list)
    ect: Optional[CoefficientRow] = None
    long_run: List[CoefficientRow] = Field(default_factory=list)
    diagnostics: List[DiagnosticRow] = Field(default_factory=list)
    stability: List[StabilityRow] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class RobustnessBlock(BlockBase):
    dependent: str = ""
    bandwidth: Optional[int] = None
    fmols: List[CoefficientRow] = Field(default_factory=list)
    ccr: List[CoefficientRow] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class VintageDelta(FrozenModel):
    table: str
    row: str
    column: str
    reported: float
    computed: Optional[float] = None
    delta: Optional[float] = None
    tolerance: Optional[float] = None
    within_tolerance: Optional[bool] = None


class ReportMetadata(BaseModel):
    schema_version: str
    generated_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    data_source: str
    data_vintage: str = ""
    fetch_date: Optional[str] = None
    decisions: Dict[str, str] = Field(default_factory=dict)
    vintage_deltas: List[VintageDelta] = Field(default_factory=list)


class Report(BaseModel):
    metadata: ReportMetadata
    descriptive: Optional[DescriptiveBlock] = None
    unit_root: Optional[UnitRootBlock] = None
    bounds: Optional[BoundsBlock] = None
    ecm: Optional[EcmBlock] = None
    robustness: Optional[RobustnessBlock] = None
    failed_stage: Optional[PipelineStage] = None
    error: Optional[str] = None
