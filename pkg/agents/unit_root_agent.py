import asyncio
import logging
from typing import Dict, List, Tuple

from econometrics.timeseries import diff
from econometrics.unitroot import adf, classify_order, pp
from models.schemas import (
    DeterministicSpec,
    IntegrationOrder,
    PipelineConfig,
    StatCell,
    TimeSeries,
    UnitRootBlock,
    UnitRootResult,
    UnitRootRow,
)

logger = logging.getLogger(__name__)

# (spec, test, "level" | "diff") -> result
SeriesResults = Dict[Tuple[DeterministicSpec, str, str], UnitRootResult]


def _cell(result: UnitRootResult) -> StatCell:
    return StatCell(value=result.tau, lag=result.lag_or_bandwidth, stars=result.stars)


class UnitRootAgent:
    def __init__(self, pipeline_config: PipelineConfig):
        from config import Config
        self.pipeline_config = pipeline_config
        self.config = Config.get_stage_config("unit_root")
        self.config.update(
            significance=pipeline_config.significance,
            criterion=pipeline_config.criterion,
            max_lag=pipeline_config.adf_max_lag,
            hac=pipeline_config.hac,
        )

    def _battery(self, s: TimeSeries) -> SeriesResults:
        """ADF and PP on the level and first difference, under both deterministic specs"""
        max_lag = None if self.config["max_lag"] == "auto" else int(self.config["max_lag"])
        differenced = diff(s)
        results: SeriesResults = {}
        for spec in DeterministicSpec:
            for label, series in (("level", s), ("diff", differenced)):
                results[(spec, "ADF", label)] = adf(
                    series, spec, lags="auto", criterion=self.config["criterion"], max_lag=max_lag
                )
                results[(spec, "PP", label)] = pp(series, spec, bandwidth=self.config["hac"])
        return results

    async def test_all(self, series: List[TimeSeries]) -> Tuple[UnitRootBlock, Dict[str, SeriesResults]]:
        """Run every series' battery concurrently and merge in input order"""
        batteries = await asyncio.gather(*(asyncio.to_thread(self._battery, s) for s in series))
        results = {s.name: battery for s, battery in zip(series, batteries)}

        significance = self.config["significance"]
        rows: List[UnitRootRow] = []
        warnings: List[str] = []
        for spec in DeterministicSpec:
            for s in series:
                r = results[s.name]
                status = classify_order(r[(spec, "ADF", "level")], r[(spec, "ADF", "diff")], significance)
                pp_status = classify_order(r[(spec, "PP", "level")], r[(spec, "PP", "diff")], significance)
                if status != pp_status:
                    logger.info("%s (%s): ADF says %s, PP says %s", s.name, spec.value, status.value, pp_status.value)
                if status == IntegrationOrder.HIGHER:
                    warnings.append(
                        f"{s.name} ({spec.value}) is not stationary in first differences at {significance}; "
                        "bounds inference assumes at most I(1)"
                    )
                rows.append(
                    UnitRootRow(
                        variable=s.name,
                        spec=spec,
                        adf_level=_cell(r[(spec, "ADF", "level")]),
                        adf_diff=_cell(r[(spec, "ADF", "diff")]),
                        pp_level=_cell(r[(spec, "PP", "level")]),
                        pp_diff=_cell(r[(spec, "PP", "diff")]),
                        status=status,
                    )
                )

        for message in warnings:
            logger.warning(message)
        return UnitRootBlock(significance=significance, rows=rows, warnings=warnings), results
