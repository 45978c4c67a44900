import logging
from typing import Callable, List, Tuple

from econometrics.ardl import fit_ecm
from econometrics.diagnostics import bg_lm, cusum, cusumsq, het_test, jarque_bera, ramsey_reset
from econometrics.exceptions import DataValidationError, EstimationError
from models.schemas import (
    ArdlSpec,
    Coefficient,
    CoefficientRow,
    Dataset,
    DiagnosticRow,
    EcmBlock,
    EcmFit,
    PipelineConfig,
    StabilityRow,
    TestResult,
)

logger = logging.getLogger(__name__)


def _row(c: Coefficient) -> CoefficientRow:
    return CoefficientRow.from_estimate(c.name, c.coefficient, c.std_error, c.t_stat, c.p_value)


class EcmAgent:
    def __init__(self, pipeline_config: PipelineConfig):
        from config import Config
        self.config = Config.get_stage_config("ecm")
        self.config.update(
            bg_lags=pipeline_config.bg_lags,
            reset_powers=pipeline_config.reset_powers,
            significance=pipeline_config.significance,
        )

    def _diagnostics(self, fit: EcmFit, warnings: List[str]) -> List[DiagnosticRow]:
        levels = fit.levels_fit
        checks: List[Tuple[str, Callable[[], TestResult]]] = [
            ("Breusch-Godfrey LM", lambda: bg_lm(levels, lags=self.config["bg_lags"])),
            ("Breusch-Pagan-Godfrey", lambda: het_test(levels)),
            ("Jarque-Bera", lambda: jarque_bera(levels.residuals)),
            ("Ramsey RESET", lambda: ramsey_reset(levels, powers=self.config["reset_powers"])),
        ]
        rows = []
        for name, check in checks:
            try:
                result = check()
            except (EstimationError, DataValidationError) as e:
                warnings.append(f"{name} not computed: {e}")
                rows.append(DiagnosticRow(name=name))
                continue
            rows.append(
                DiagnosticRow(
                    name=result.name,
                    statistic=result.statistic,
                    df=list(result.df),
                    p_value=result.p_value,
                    variant=result.variant,
                )
            )
        return rows

    def _stability(self, fit: EcmFit, warnings: List[str]) -> List[StabilityRow]:
        levels = fit.levels_fit
        rows = []
        for test in (cusum, cusumsq):
            try:
                path = test(levels.y, levels.design, self.config["significance"])
            except (EstimationError, DataValidationError) as e:
                warnings.append(f"{test.__name__.upper()} not computed: {e}")
                continue
            rows.append(StabilityRow(name=path.name, verdict=path.verdict))
        return rows

    async def estimate(self, dataset: Dataset, spec: ArdlSpec) -> Tuple[EcmBlock, EcmFit]:
        """Error-correction estimates with residual diagnostics and stability verdicts"""
        fit = fit_ecm(spec, dataset)
        warnings = list(fit.warnings)
        diagnostics = self._diagnostics(fit, warnings)
        stability = self._stability(fit, warnings)

        for message in warnings[len(fit.warnings):]:
            logger.warning(message)

        block = EcmBlock(
            dependent=spec.dep,
            short_run=[_row(c) for c in fit.short_run],
            ect=_row(fit.ect),
            long_run=[_row(c) for c in fit.long_run],
            diagnostics=diagnostics,
            stability=stability,
            warnings=warnings,
        )
        return block, fit
