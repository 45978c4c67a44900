"""
Annual time-series data model helpers: CSV ingestion and emission, differencing,
lagging, common-sample alignment and descriptive statistics.
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from econometrics.exceptions import DataValidationError
from models.schemas import Dataset, DatasetRoles, DescriptiveStats, TimeSeries

logger = logging.getLogger(__name__)


def read_series_csv(path: Union[str, Path]) -> Dict[str, TimeSeries]:
    """Read a year-indexed CSV into series keyed by column name, preserving column order."""
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"Data file not found: {path}")

    try:
        df = pd.read_csv(path, sep=",", encoding="utf-8", dtype=str, keep_default_na=False)
    except (pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataValidationError(f"Cannot parse {path}: {e}")

    if df.shape[1] < 2:
        raise DataValidationError(f"{path}: no data columns (only a year column found)")
    if _looks_numeric(str(df.columns[0])):
        raise DataValidationError(f"{path}: header row missing")
    if df.empty:
        raise DataValidationError(f"{path}: no observations")

    years = pd.to_numeric(df.iloc[:, 0].str.strip(), errors="coerce")
    if years.isna().any() or (years % 1 != 0).any():
        bad = df.iloc[:, 0][years.isna() | (years % 1 != 0)].tolist()
        raise DataValidationError(f"{path}: first column must hold integer years, got {bad[:3]}")
    years = years.astype(int)

    duplicated = years[years.duplicated()].unique().tolist()
    if duplicated:
        raise DataValidationError(f"{path}: duplicate year(s) {duplicated}")

    order = np.argsort(years.to_numpy(), kind="stable")
    years = years.iloc[order].reset_index(drop=True)
    df = df.iloc[order].reset_index(drop=True)

    gaps = [int(y) for prev, y in zip(years[:-1], years[1:]) if y - prev != 1]
    if gaps:
        raise DataValidationError(f"{path}: gap in years before {gaps}")

    series: Dict[str, TimeSeries] = {}
    for column in df.columns[1:]:
        raw = df[column].str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        missing = raw == ""
        if missing.any():
            raise DataValidationError(
                f"{path}: missing value in column '{column}' for year {int(years[missing.idxmax()])}"
            )
        if values.isna().any():
            row = values.isna().idxmax()
            raise DataValidationError(
                f"{path}: non-numeric cell {raw[row]!r} in column '{column}', year {int(years[row])}"
            )
        series[str(column)] = TimeSeries(name=str(column), start_year=int(years.iloc[0]), values=values.to_numpy())

    logger.debug("Read %d series of length %d from %s", len(series), len(years), path)
    return series


def load_csv(path: Union[str, Path], roles: Optional[Union[DatasetRoles, Mapping]] = None) -> Dataset:
    """
    Load a Dataset from a CSV file.

    The first column holds consecutive integer years; every other column is a
    numeric series. Without a role mapping the first data column is the
    dependent variable and the remaining columns, in file order, are regressors.
    """
    series = read_series_csv(path)
    names = list(series)

    if roles is None:
        if len(names) < 2:
            raise DataValidationError(f"{path}: need a dependent column and at least one regressor")
        roles = DatasetRoles(dependent=names[0], regressors=tuple(names[1:]))
    elif not isinstance(roles, DatasetRoles):
        roles = DatasetRoles(dependent=roles["dependent"], regressors=tuple(roles["regressors"]))

    return build_dataset(series, roles)


def build_dataset(series: Mapping[str, TimeSeries], roles: DatasetRoles) -> Dataset:
    """Assemble a Dataset, reporting unresolved role names by role."""
    if roles.dependent not in series:
        raise DataValidationError(f"Unknown role name: dependent variable '{roles.dependent}' not found in data")
    unknown = [name for name in roles.regressors if name not in series]
    if unknown:
        raise DataValidationError(f"Unknown role name: regressor(s) {unknown} not found in data")

    lengths = {(s.start_year, len(s)) for s in series.values()}
    if len(lengths) != 1:
        raise DataValidationError("Series do not share a common year range")

    return Dataset(series=dict(series), roles=roles)


def write_csv(data: Union[Dataset, Iterable[TimeSeries]], path: Union[str, Path]) -> Path:
    """Write series as year,<name>... CSV; floats are emitted at full round-trip precision."""
    members = list(data.series.values()) if isinstance(data, Dataset) else list(data)
    if not members:
        raise DataValidationError("Nothing to write")
    frame = pd.concat([s.to_pandas() for s in members], axis=1).reset_index()

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding="utf-8")
    except OSError as e:
        raise DataValidationError(f"Cannot write {path}: {e}")
    return path


def diff(s: TimeSeries, order: int = 1) -> TimeSeries:
    """order-th difference; the result starts `order` years later."""
    if order < 1:
        raise DataValidationError("Difference order must be a positive integer")
    if order >= len(s):
        raise DataValidationError(f"Difference order {order} must be below series length {len(s)}")
    name = f"D({s.name})" if order == 1 else f"D{order}({s.name})"
    return TimeSeries(name=name, start_year=s.start_year + order, values=np.diff(s.as_array(), n=order))


def lag(s: TimeSeries, k: int) -> TimeSeries:
    """Shift forward k periods: value of year t is the original value of year t-k."""
    if k < 0:
        raise DataValidationError("Lag must be nonnegative")
    if k >= len(s):
        raise DataValidationError(f"Lag {k} must be below series length {len(s)}")
    if k == 0:
        return s
    return TimeSeries(name=f"{s.name}(-{k})", start_year=s.start_year + k, values=s.values[: len(s) - k])


def describe(s: TimeSeries) -> DescriptiveStats:
    if len(s) < 2:
        raise DataValidationError(f"Series '{s.name}' needs at least 2 observations for a standard deviation")
    x = s.as_array()
    lo, hi = float(x.min()), float(x.max())
    mean = min(max(float(x.mean()), lo), hi)
    return DescriptiveStats(
        name=s.name,
        obs=len(x),
        mean=mean,
        std=float(x.std(ddof=1)),
        min=lo,
        max=hi,
    )


def describe_all(d: Dataset) -> List[DescriptiveStats]:
    """Descriptive statistics for every member series in model order, then any extras."""
    ordered = d.model_names + [name for name in d.series if name not in d.model_names]
    return [describe(d.series[name]) for name in ordered]


class AlignedSample:
    """
    Common effective sample for regressions that mix lags and differences.

    Rows correspond to original positions offset..n-1, where
    offset = max_lag + diff_order, so every requested lag or lagged difference
    is observed on every row.
    """

    def __init__(self, arrays: Dict[str, np.ndarray], start_year: int, offset: int, max_lag: int, diff_order: int):
        self._arrays = arrays
        self._length = len(next(iter(arrays.values())))
        self.offset = offset
        self.max_lag = max_lag
        self.diff_order = diff_order
        self.start_year = start_year + offset

    @property
    def n_obs(self) -> int:
        return self._length - self.offset

    @property
    def years(self) -> List[int]:
        return list(range(self.start_year, self.start_year + self.n_obs))

    def _array(self, name: str) -> np.ndarray:
        try:
            return self._arrays[name]
        except KeyError:
            raise DataValidationError(f"Series '{name}' is not part of the aligned sample")

    def level(self, name: str, k: int = 0) -> np.ndarray:
        if not 0 <= k <= self.offset:
            raise DataValidationError(f"Lag {k} of '{name}' falls outside the aligned sample")
        x = self._array(name)
        return x[self.offset - k: self._length - k]

    def delta(self, name: str, k: int = 0) -> np.ndarray:
        if not 0 <= k or k + 1 > self.offset:
            raise DataValidationError(f"Lagged difference {k} of '{name}' falls outside the aligned sample")
        x = self._array(name)
        return x[self.offset - k: self._length - k] - x[self.offset - k - 1: self._length - k - 1]

    def constant(self) -> np.ndarray:
        return np.ones(self.n_obs)

    def trend(self) -> np.ndarray:
        return np.arange(1, self.n_obs + 1, dtype=float)


def align(d: Union[Dataset, TimeSeries], max_lag: int, diff_order: int = 0) -> AlignedSample:
    """Effective sample of length T - max_lag - diff_order shared by all requested terms."""
    if max_lag < 0 or diff_order < 0:
        raise DataValidationError("max_lag and diff_order must be nonnegative")
    if isinstance(d, TimeSeries):
        arrays = {d.name: d.as_array()}
        start_year, length = d.start_year, len(d)
    else:
        arrays = {name: s.as_array() for name, s in d.series.items()}
        start_year, length = d.start_year, d.length

    offset = max_lag + diff_order
    if length - offset <= 0:
        raise DataValidationError(
            f"Empty effective sample: length {length}, max_lag {max_lag}, difference order {diff_order}"
        )
    return AlignedSample(arrays, start_year, offset, max_lag, diff_order)


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False
