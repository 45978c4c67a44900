#!/usr/bin/env python3
import argparse
import asyncio
import hashlib
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from config import Config, load_pipeline_config
from database.wdi_connector import WdiConnector
from econometrics.ardl import CASE_LABELS
from econometrics.exceptions import ArdlKitError, DataValidationError, StageError
from econometrics.timeseries import build_dataset, describe, read_series_csv, write_csv
from agents.describe_agent import DescribeAgent
from agents.unit_root_agent import UnitRootAgent
from agents.cointegration_agent import CointegrationAgent
from agents.ecm_agent import EcmAgent
from agents.robustness_agent import RobustnessAgent
from agents.report_agent import ReportAgent, fmt
from agents.reference_tables import vintage_deltas
from models.schemas import (
    BlockStatus,
    BoundsDecision,
    Dataset,
    DatasetRoles,
    DeterministicSpec,
    EcmBlock,
    PipelineConfig,
    PipelineStage,
    Report,
    ReportMetadata,
    RobustnessBlock,
    TimeSeries,
)

logger = logging.getLogger("ardl-kit")


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:12]


class ArdlStudyPipeline:
    def __init__(self, pipeline_config: PipelineConfig, connector: Optional[WdiConnector] = None):
        self.pipeline_config = pipeline_config
        self.connector = connector
        self.agents = {}

    def initialize(self):
        """Initialize stage agents"""
        cfg = self.pipeline_config
        agents_to_initialize = [
            ("describe", DescribeAgent, []),
            ("unit_root", UnitRootAgent, [cfg]),
            ("cointegration", CointegrationAgent, [cfg]),
            ("ecm", EcmAgent, [cfg]),
            ("robustness", RobustnessAgent, [cfg]),
            ("report", ReportAgent, [cfg.output_dir, cfg.formats]),
        ]
        for agent_name, agent_class, args in agents_to_initialize:
            self.agents[agent_name] = agent_class(*args)
        if cfg.source == "wdi" and self.connector is None:
            self.connector = WdiConnector(fixtures_dir=cfg.wdi_fixtures)
        return self

    def _decisions(self) -> Dict[str, str]:
        cfg = self.pipeline_config
        return {
            "bounds_case": CASE_LABELS[cfg.bounds_case],
            "criterion": cfg.criterion.value,
            "ardl_grid": f"p in 1..{cfg.max_p}, q in 0..{cfg.max_q}",
            "significance": cfg.significance,
            "hac": f"bartlett, bandwidth {cfg.bandwidth}",
            "adf_max_lag": str(cfg.adf_max_lag),
            "unit_root_status": "ADF classification; PP shown alongside",
            "diagnostics_on": "levels ARDL residuals",
            "bg_lags": str(cfg.bg_lags),
            "reset_powers": ",".join(str(p) for p in cfg.reset_powers),
        }

    def load_dataset(self) -> Tuple[Dataset, str, str, Optional[str]]:
        """Dataset plus (source label, vintage, fetch date)"""
        cfg = self.pipeline_config
        roles = DatasetRoles(dependent=cfg.dependent, regressors=cfg.regressors)

        if cfg.source == "csv":
            series = read_series_csv(cfg.data_csv)
            return build_dataset(series, roles), f"csv:{cfg.data_csv.name}", f"sha256:{_file_digest(cfg.data_csv)}", None

        fetched = self.connector.fetch_many(cfg.wdi_indicators, cfg.wdi_country, cfg.wdi_from, cfg.wdi_to)
        series: Dict[str, TimeSeries] = {}
        if cfg.data_csv is not None:
            for name, s in read_series_csv(cfg.data_csv).items():
                if name in fetched:
                    continue
                if s.start_year > cfg.wdi_from or s.end_year < cfg.wdi_to:
                    raise DataValidationError(
                        f"CSV series '{name}' covers {s.start_year}-{s.end_year}, not {cfg.wdi_from}-{cfg.wdi_to}"
                    )
                offset = cfg.wdi_from - s.start_year
                series[name] = TimeSeries(
                    name=name,
                    start_year=cfg.wdi_from,
                    values=s.values[offset: offset + cfg.wdi_to - cfg.wdi_from + 1],
                )
        series.update(fetched)

        mode = "fixture" if self.connector.fixture_mode else "live"
        vintage = ", ".join(f"{code} lastupdated {self.connector.vintages.get(code, '?')}"
                            for code in cfg.wdi_indicators.values())
        return build_dataset(series, roles), f"wdi:{cfg.wdi_country} ({mode})", vintage, self.connector.fetch_date

    async def _fail(self, report: Report, stage: PipelineStage, error: Exception):
        report.failed_stage = stage
        report.error = str(error)
        logger.error("❌ %s failed: %s", stage.value, error)
        try:
            await self.agents["report"].persist(report)
        except ArdlKitError as e:
            logger.error("Partial report could not be written: %s", e)
        raise StageError(stage.value, error) from error

    async def run_pipeline(self) -> Report:
        """Run ingest -> describe -> unit roots -> bounds -> ECM -> FMOLS/CCR and persist the report"""
        if not self.agents:
            self.initialize()
        cfg = self.pipeline_config
        report = Report(
            metadata=ReportMetadata(
                schema_version=Config.REPORT_SCHEMA_VERSION,
                data_source=str(cfg.source),
                decisions=self._decisions(),
            )
        )

        stage = PipelineStage.INGEST
        try:
            # Step 1: Ingest
            logger.info("Step 1: Loading data...")
            dataset, source, vintage, fetch_date = self.load_dataset()
            report.metadata.data_source = source
            report.metadata.data_vintage = vintage
            report.metadata.fetch_date = fetch_date
            last_year = dataset.start_year + dataset.length - 1
            logger.info("✅ %d series, %d-%d", len(dataset.series), dataset.start_year, last_year)

            # Step 2: Descriptive statistics
            stage = PipelineStage.DESCRIBE
            logger.info("Step 2: Descriptive statistics...")
            report.descriptive = await self.agents["describe"].describe(dataset)

            # Step 3: Unit roots
            stage = PipelineStage.UNIT_ROOT
            logger.info("Step 3: Unit root tests (ADF, PP)...")
            report.unit_root, _ = await self.agents["unit_root"].test_all(
                [dataset.series[name] for name in dataset.model_names]
            )
            logger.info("✅ Integration orders: %s", ", ".join(
                f"{r.variable}={r.status.value}" for r in report.unit_root.rows if r.spec == DeterministicSpec.CONSTANT
            ))

            # Step 4: ARDL selection and bounds test
            stage = PipelineStage.BOUNDS
            logger.info("Step 4: ARDL selection and bounds test...")
            report.bounds, spec, bounds = await self.agents["cointegration"].select_and_test(dataset)
            decision = bounds.decision[cfg.significance]
            logger.info("✅ ARDL%s, F = %s, %s at %s",
                        spec.label, fmt(bounds.f_stat, bounds.stars), decision.value, cfg.significance)

            if decision != BoundsDecision.COINTEGRATED:
                reason = f"bounds decision at {cfg.significance} is {decision.value}"
                report.ecm = EcmBlock(status=BlockStatus.SKIPPED, reason=reason)
                report.robustness = RobustnessBlock(status=BlockStatus.SKIPPED, reason=reason)
                logger.warning("⚠️  Skipping ECM and robustness: %s", reason)
            else:
                # Step 5: Error correction and diagnostics
                stage = PipelineStage.ECM
                logger.info("Step 5: Error-correction model and diagnostics...")
                report.ecm, _ = await self.agents["ecm"].estimate(dataset, spec)
                logger.info("✅ ECT = %s", fmt(report.ecm.ect.coefficient if report.ecm.ect else None))

                # Step 6: FMOLS / CCR
                stage = PipelineStage.ROBUSTNESS
                logger.info("Step 6: FMOLS and CCR robustness checks...")
                report.robustness, _ = await self.agents["robustness"].estimate(dataset)
                logger.info("✅ bandwidth %s", report.robustness.bandwidth)

            # Step 7: Report
            stage = PipelineStage.REPORT
            logger.info("Step 7: Writing report...")
            report.metadata.vintage_deltas = vintage_deltas(report)
            for message in (d for d in report.metadata.vintage_deltas if d.within_tolerance is False):
                logger.warning("Table %s %s %s: computed %s vs reported %.3f", message.table, message.row,
                               message.column, fmt(message.computed), message.reported)
            paths = await self.agents["report"].persist(report)
            for path in paths:
                logger.info("✅ %s", path)
        except Exception as e:
            await self._fail(report, stage, e)

        return report


# ---------------------------------------------------------------- command line

def exit_code_for(error: BaseException) -> int:
    """1 for validation problems, 2 for computation problems"""
    cause = error.cause if isinstance(error, StageError) else error
    return 1 if isinstance(cause, (DataValidationError, ValidationError)) else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ardl-kit", description="ARDL bounds-testing study pipeline")
    parser.add_argument("--log-level", default=Config.LOG_LEVEL, help="Logging level (default: %(default)s)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run the full study from a config file")
    run.add_argument("--config", required=True, type=Path)

    fetch = commands.add_parser("fetch", help="Fetch one World Bank indicator into a CSV file")
    fetch.add_argument("--indicator", required=True)
    fetch.add_argument("--country", required=True)
    fetch.add_argument("--from", dest="start", required=True, type=int)
    fetch.add_argument("--to", dest="end", required=True, type=int)
    fetch.add_argument("--out", required=True, type=Path)
    fetch.add_argument("--name", help="Column name (default: the indicator code)")
    fetch.add_argument("--fixtures", type=Path, help="Replay recorded responses from this directory")

    describe_cmd = commands.add_parser("describe", help="Descriptive statistics of a CSV dataset")
    describe_cmd.add_argument("--data", required=True, type=Path)
    return parser


def _run(args) -> int:
    pipeline_config = load_pipeline_config(args.config)
    report = asyncio.run(ArdlStudyPipeline(pipeline_config).initialize().run_pipeline())
    decision = report.bounds.decision.get(pipeline_config.significance) if report.bounds else None
    print(f"Done: bounds decision {decision.value if decision else 'n/a'}")
    return 0


def _fetch(args) -> int:
    connector = WdiConnector(fixtures_dir=args.fixtures)
    series = connector.fetch(args.indicator, args.country, args.start, args.end, name=args.name)
    write_csv([series], args.out)
    print(f"✅ {len(series)} observations of {args.indicator}/{args.country.upper()} written to {args.out}")
    return 0


def _describe(args) -> int:
    print(f"{'Symbol':<10} {'Obs.':>5} {'Mean':>10} {'Std.':>10} {'Min.':>10} {'Max.':>10}")
    for s in read_series_csv(args.data).values():
        d = describe(s)
        print(f"{d.name:<10} {d.obs:>5} {fmt(d.mean):>10} {fmt(d.std):>10} {fmt(d.min):>10} {fmt(d.max):>10}")
    return 0


COMMANDS = {"run": _run, "fetch": _fetch, "describe": _describe}


def cli(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ArdlKitError as e:
        logger.error("❌ %s", e)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(cli())
