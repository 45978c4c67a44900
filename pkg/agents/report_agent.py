"""
Report emission: a schema-versioned JSON document and a plain-text rendering
laid out like the study's Tables 1-5 (3 decimals, significance stars, lag
vectors in parentheses).
"""
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from econometrics.exceptions import DataValidationError
from models.schemas import (
    BlockBase,
    BlockStatus,
    CoefficientRow,
    DeterministicSpec,
    Report,
    StatCell,
)

SPEC_TITLES = {
    DeterministicSpec.CONSTANT: "Constant",
    DeterministicSpec.CONSTANT_TREND: "Constant and trend",
}


def fmt(value: Optional[float], stars: str = "") -> str:
    return "n/a" if value is None else f"{value:.3f}{stars}"


def _cell(cell: StatCell) -> str:
    return f"{fmt(cell.value, cell.stars):>10} [{'' if cell.lag is None else cell.lag}]"


def _lag_vector(lags) -> str:
    return "(" + ", ".join(str(v) for v in lags) + ")"


def _status_line(block: Optional[BlockBase]) -> Optional[str]:
    if block is None:
        return "  not run"
    if block.status != BlockStatus.COMPLETED:
        return f"  {block.status.value}: {block.reason or ''}".rstrip()
    return None


def _coefficient_lines(rows: List[CoefficientRow]) -> List[str]:
    lines = [f"  {'Regressors':<10} {'Coefficient':>12} {'Std. Error':>11} {'t-Statistic':>12}"]
    for r in rows:
        lines.append(f"  {r.name:<10} {fmt(r.coefficient, r.stars):>12} {fmt(r.std_error):>11} {fmt(r.t_stat):>12}")
    return lines


def render_text(report: Report) -> str:
    meta = report.metadata
    lines = [
        f"ardl-kit report (schema {meta.schema_version})",
        f"Data source: {meta.data_source}",
    ]
    if meta.data_vintage:
        lines.append(f"Data vintage: {meta.data_vintage}")
    if meta.fetch_date:
        lines.append(f"Fetch date: {meta.fetch_date}")
    if report.failed_stage is not None:
        lines.append(f"FAILED at stage '{report.failed_stage.value}': {report.error}")
    lines.append("")

    # Table 1
    lines.append("Table 1: Descriptive Statistics")
    status = _status_line(report.descriptive)
    if status:
        lines.append(status)
    else:
        lines.append(f"  {'Symbol':<8} {'Obs.':>5} {'Mean':>10} {'Std.':>10} {'Min.':>10} {'Max.':>10}")
        for r in report.descriptive.rows:
            lines.append(
                f"  {r.symbol:<8} {r.obs:>5} {fmt(r.mean):>10} {fmt(r.std):>10} {fmt(r.min):>10} {fmt(r.max):>10}"
            )
    lines.append("")

    # Table 2
    lines.append("Table 2: Unit Root Test Results")
    status = _status_line(report.unit_root)
    if status:
        lines.append(status)
    else:
        block = report.unit_root
        header = (
            f"  {'Variable':<8} {'ADF level':>15} {'ADF 1st diff':>15} "
            f"{'PP level':>15} {'PP 1st diff':>15}  Status"
        )
        for spec in DeterministicSpec:
            rows = [r for r in block.rows if r.spec == spec]
            if not rows:
                continue
            lines.append(f" {SPEC_TITLES[spec]}")
            lines.append(header)
            for r in rows:
                lines.append(
                    f"  {r.variable:<8} {_cell(r.adf_level)} {_cell(r.adf_diff)} "
                    f"{_cell(r.pp_level)} {_cell(r.pp_diff)}  {r.status.value}"
                )
        lines.append(f"  Status from ADF at {block.significance}; [ ] holds the lag (ADF) or bandwidth (PP)")
        lines.extend(f"  warning: {w}" for w in block.warnings)
    lines.append("")

    # Table 3
    lines.append("Table 3: ARDL Bounds Test")
    status = _status_line(report.bounds)
    if status:
        lines.append(status)
    else:
        b = report.bounds
        lines.append(f"  Model: {b.model}")
        lines.append(f"  Optimal lag length: {_lag_vector(b.lags)} by {b.criterion.value.upper() if b.criterion else 'n/a'}")
        lines.append(f"  F-statistics: {fmt(b.f_stat, b.stars)} (k = {b.k}, case {b.case or 'n/a'})")
        lines.append(f"  {'Level':<6} {'I(0)':>8} {'I(1)':>8}  Decision")
        for level, (lower, upper) in b.bounds.items():
            lines.append(f"  {level:<6} {lower:>8.2f} {upper:>8.2f}  {b.decision[level].value}")
    lines.append("")

    # Table 4
    lines.append("Table 4: Short-run and Long-run Results")
    status = _status_line(report.ecm)
    if status:
        lines.append(status)
    else:
        e = report.ecm
        lines.append(f" Dependent variable: {e.dependent}    Short-run coefficients")
        lines.extend(_coefficient_lines(e.short_run + ([e.ect] if e.ect else [])))
        lines.append(f" Dependent variable: {e.dependent}    Long-run coefficients")
        lines.extend(_coefficient_lines(e.long_run))
        lines.append(" Diagnostic tests")
        for d in e.diagnostics:
            df = ", ".join(str(v) for v in d.df)
            lines.append(f"  {d.name:<24} stat {fmt(d.statistic):>10}  df ({df})  P value {fmt(d.p_value)}")
        for s in e.stability:
            lines.append(f"  {s.name:<24} {s.verdict.value.capitalize()}")
        lines.extend(f"  warning: {w}" for w in e.warnings)
    lines.append("")

    # Table 5
    lines.append("Table 5: Robustness Check Results")
    status = _status_line(report.robustness)
    if status:
        lines.append(status)
    else:
        r = report.robustness
        lines.append(f" Dependent variable: {r.dependent}    bandwidth {r.bandwidth}")
        lines.append(" FMOLS")
        lines.extend(_coefficient_lines(r.fmols))
        lines.append(" CCR")
        lines.extend(_coefficient_lines(r.ccr))
        lines.extend(f"  warning: {w}" for w in r.warnings)
    lines.append("")

    lines.append("Note: ***, **, and * denote significance at the 1%, 5%, and 10% levels.")

    if meta.decisions:
        lines.append("")
        lines.append("Decisions")
        lines.extend(f"  {key}: {value}" for key, value in meta.decisions.items())

    flagged = [d for d in meta.vintage_deltas if d.within_tolerance is False]
    if meta.vintage_deltas:
        lines.append("")
        lines.append(f"Vintage deltas versus the published tables ({len(flagged)} outside tolerance)")
        for d in meta.vintage_deltas:
            mark = {True: "ok", False: "OUTSIDE", None: ""}[d.within_tolerance]
            lines.append(
                f"  Table {d.table} {d.row:<22} {d.column:<12} reported {d.reported:>9.3f} "
                f"computed {fmt(d.computed):>9} delta {fmt(d.delta):>8} {mark}".rstrip()
            )

    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str, path: Union[str, Path]) -> Path:
    """Write `report` as "json" or "text" to `path`."""
    path = Path(path)
    if format == "json":
        content = report.model_dump_json(indent=2) + "\n"
    elif format == "text":
        content = render_text(report)
    else:
        raise DataValidationError(f"Unknown report format: {format!r} (expected text or json)")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    except OSError as e:
        raise DataValidationError(f"Cannot write report to {path}: {e}")
    return path


def load_report(path: Union[str, Path]) -> Report:
    path = Path(path)
    try:
        return Report.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DataValidationError(f"Cannot read report {path}: {e}")
    except ValidationError as e:
        raise DataValidationError(f"{path} is not a valid report: {e}")


REPORT_FILES = {"text": "report.txt", "json": "report.json"}


class ReportAgent:
    def __init__(self, output_dir: Union[str, Path], formats=("text", "json")):
        self.output_dir = Path(output_dir)
        self.formats = tuple(formats)

    async def persist(self, report: Report) -> List[Path]:
        """Write every configured rendering into the output directory"""
        return [emit_report(report, fmt_name, self.output_dir / REPORT_FILES[fmt_name]) for fmt_name in self.formats]
