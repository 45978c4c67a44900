import os
from pathlib import Path
from typing import Any, Dict, Union

from dotenv import load_dotenv
from pydantic import ValidationError

from econometrics.exceptions import ConfigError
from models.schemas import PipelineConfig

load_dotenv()


def _int_or_keyword(raw: str, keyword: str) -> Union[int, str]:
    raw = raw.strip().lower()
    return raw if raw == keyword else int(raw)


class Config:
    # Project root directory
    PROJECT_ROOT = Path(__file__).parent.absolute()

    # Data, fixture and output locations
    DATA_DIR = Path(os.getenv("DATA_DIR", PROJECT_ROOT / "data"))
    FIXTURES_DIR = Path(os.getenv("FIXTURES_DIR", PROJECT_ROOT / "fixtures" / "wdi"))
    OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", "output"))
    DEFAULT_DATA_CSV = DATA_DIR / "turkiye_2000_2022.csv"

    # ARDL model selection
    ARDL_MAX_P = int(os.getenv("ARDL_MAX_P", "2"))
    ARDL_MAX_Q = int(os.getenv("ARDL_MAX_Q", "2"))
    ARDL_CRITERION = os.getenv("ARDL_CRITERION", "aic").lower()
    ARDL_SIGNIFICANCE = os.getenv("ARDL_SIGNIFICANCE", "5%")
    ARDL_WORKERS = int(os.getenv("ARDL_WORKERS", "1"))
    ARDL_BOUNDS_CASE = os.getenv("ARDL_BOUNDS_CASE", "II").upper()

    # HAC bandwidth shared by PP, FMOLS and CCR
    ARDL_BANDWIDTH = _int_or_keyword(os.getenv("ARDL_BANDWIDTH", "automatic"), "automatic")

    # Diagnostics
    BG_LM_LAGS = int(os.getenv("BG_LM_LAGS", "2"))
    RESET_POWERS = tuple(int(p) for p in os.getenv("RESET_POWERS", "2").split(",") if p.strip())

    # World Bank client
    WDI_BASE_URL = os.getenv("WDI_BASE_URL", "https://api.worldbank.org")
    WDI_TIMEOUT_SECONDS = float(os.getenv("WDI_TIMEOUT_SECONDS", "30"))
    WDI_PER_PAGE = int(os.getenv("WDI_PER_PAGE", "100"))
    WDI_INDICATORS = {"UNP": "SL.UEM.TOTL.ZS", "INF": "FP.CPI.TOTL.ZG"}

    # Reporting
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    REPORT_SCHEMA_VERSION = os.getenv("REPORT_SCHEMA_VERSION", "1.0")

    @classmethod
    def validate_config(cls):
        """Validate configuration values"""
        issues = []
        warnings = []

        if cls.ARDL_MAX_P < 1:
            issues.append("ARDL_MAX_P must be at least 1")
        if cls.ARDL_MAX_Q < 0:
            issues.append("ARDL_MAX_Q must be nonnegative")
        elif cls.ARDL_MAX_P + cls.ARDL_MAX_Q > 8:
            warnings.append("Large lag grid; annual samples rarely support more than a few lags")

        if cls.ARDL_CRITERION not in ("aic", "sic", "hq"):
            issues.append("ARDL_CRITERION must be one of aic, sic, hq")
        if cls.ARDL_SIGNIFICANCE not in ("1%", "5%", "10%"):
            issues.append("ARDL_SIGNIFICANCE must be one of 1%, 5%, 10%")
        if cls.ARDL_WORKERS < 1:
            issues.append("ARDL_WORKERS must be positive")
        if cls.ARDL_BOUNDS_CASE not in ("II", "III"):
            issues.append("ARDL_BOUNDS_CASE must be II or III")
        if isinstance(cls.ARDL_BANDWIDTH, int) and cls.ARDL_BANDWIDTH < 0:
            issues.append("ARDL_BANDWIDTH must be 'automatic' or a nonnegative integer")

        if cls.BG_LM_LAGS < 1:
            issues.append("BG_LM_LAGS must be positive")
        if not cls.RESET_POWERS or any(p < 2 for p in cls.RESET_POWERS):
            issues.append("RESET_POWERS must list integers >= 2")

        if cls.WDI_TIMEOUT_SECONDS <= 0:
            issues.append("WDI_TIMEOUT_SECONDS must be positive")
        if not 1 <= cls.WDI_PER_PAGE <= 32500:
            issues.append("WDI_PER_PAGE must be between 1 and 32500")

        if not cls.DEFAULT_DATA_CSV.exists():
            warnings.append(f"Bundled dataset not found: {cls.DEFAULT_DATA_CSV}")
        if not cls.FIXTURES_DIR.exists():
            warnings.append(f"WDI fixture directory not found: {cls.FIXTURES_DIR}")

        return {"issues": issues, "warnings": warnings}

    @classmethod
    def get_stage_config(cls, stage: str) -> Dict[str, Any]:
        """Get configuration for a specific pipeline stage"""
        base_config = {
            "significance": cls.ARDL_SIGNIFICANCE,
            "bandwidth": cls.ARDL_BANDWIDTH,
        }

        # Stage-specific overrides
        stage_configs = {
            "unit_root": {
                "criterion": cls.ARDL_CRITERION,
                "max_lag": "auto",
            },
            "cointegration": {
                "max_p": cls.ARDL_MAX_P,
                "max_q": cls.ARDL_MAX_Q,
                "criterion": cls.ARDL_CRITERION,
                "workers": cls.ARDL_WORKERS,
                "bounds_case": cls.ARDL_BOUNDS_CASE,
            },
            "ecm": {
                "bg_lags": cls.BG_LM_LAGS,
                "reset_powers": cls.RESET_POWERS,
            },
            "robustness": {
                "df_adjust": False,
            },
            "report": {
                "schema_version": cls.REPORT_SCHEMA_VERSION,
                "output_dir": cls.OUTPUT_DIR,
            },
            "wdi": {
                "base_url": cls.WDI_BASE_URL,
                "timeout": cls.WDI_TIMEOUT_SECONDS,
                "per_page": cls.WDI_PER_PAGE,
                "fixtures_dir": cls.FIXTURES_DIR,
            },
        }

        if stage in stage_configs:
            base_config.update(stage_configs[stage])

        return base_config

    @classmethod
    def defaults(cls) -> Dict[str, Any]:
        """Study-file defaults for keys a config file leaves out"""
        return {
            "max_p": cls.ARDL_MAX_P,
            "max_q": cls.ARDL_MAX_Q,
            "criterion": cls.ARDL_CRITERION,
            "significance": cls.ARDL_SIGNIFICANCE,
            "bandwidth": cls.ARDL_BANDWIDTH,
            "bg_lags": cls.BG_LM_LAGS,
            "reset_powers": cls.RESET_POWERS,
            "workers": cls.ARDL_WORKERS,
            "bounds_case": cls.ARDL_BOUNDS_CASE,
            "output_dir": cls.OUTPUT_DIR,
        }


# ------------------------------------------------------------ study files

def _comma_list(raw: str):
    return tuple(item.strip() for item in raw.split(",") if item.strip())


def _indicator_map(raw: str) -> Dict[str, str]:
    mapping = {}
    for item in _comma_list(raw):
        name, sep, code = item.partition(":")
        if not sep or not name.strip() or not code.strip():
            raise ValueError(f"expected NAME:CODE, got '{item}'")
        mapping[name.strip()] = code.strip()
    return mapping


_PARSERS = {
    "source": str.strip,
    "data_csv": Path,
    "wdi_indicators": _indicator_map,
    "wdi_country": lambda raw: raw.strip().upper(),
    "wdi_from": int,
    "wdi_to": int,
    "wdi_fixtures": Path,
    "dependent": str.strip,
    "regressors": _comma_list,
    "max_p": int,
    "max_q": int,
    "criterion": lambda raw: raw.strip().lower(),
    "significance": str.strip,
    "bandwidth": lambda raw: _int_or_keyword(raw, "automatic"),
    "adf_max_lag": lambda raw: _int_or_keyword(raw, "auto"),
    "bg_lags": int,
    "reset_powers": lambda raw: tuple(int(p) for p in _comma_list(raw)),
    "workers": int,
    "bounds_case": lambda raw: raw.strip().upper(),
    "output_dir": Path,
    "formats": _comma_list,
}

_PATH_KEYS = ("data_csv", "wdi_fixtures", "output_dir")


def parse_pipeline_config(text: str, base_dir: Union[str, Path] = ".") -> PipelineConfig:
    """Parse flat `key = value` study settings; `#` starts a comment."""
    base_dir = Path(base_dir)
    values: Dict[str, Any] = {}

    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, raw = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"Line {number}: expected 'key = value', got '{line.strip()}'")
        if key not in _PARSERS:
            raise ConfigError(f"Line {number}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"Line {number}: duplicate key '{key}'")
        if not raw.strip():
            raise ConfigError(f"Line {number}: key '{key}' has no value")
        try:
            value = _PARSERS[key](raw.strip())
        except ValueError as e:
            raise ConfigError(f"Line {number}: invalid value for '{key}': {e}")
        if key in _PATH_KEYS and not value.is_absolute():
            value = base_dir / value
        values[key] = value

    merged = {**Config.defaults(), **values}
    if "output_dir" not in values:
        merged["output_dir"] = base_dir / merged["output_dir"]

    try:
        return PipelineConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"Invalid configuration: {problems}")


def load_pipeline_config(path: Union[str, Path]) -> PipelineConfig:
    """Read a study configuration file; relative paths resolve against its directory."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    return parse_pipeline_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
