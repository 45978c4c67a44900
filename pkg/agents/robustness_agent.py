import logging
from typing import Dict, Tuple

import numpy as np

from econometrics.cointreg import ccr, fmols
from econometrics.linreg import pvalue
from models.schemas import CointMethod, CointRegFit, CoefficientRow, Dataset, PipelineConfig, RobustnessBlock

logger = logging.getLogger(__name__)


def _rows(fit: CointRegFit):
    rows = []
    for name, coef, se, t in zip(fit.names, fit.coefficients, fit.std_errors, fit.t_stats):
        p = pvalue("normal", float(t)) if np.isfinite(t) else None
        rows.append(CoefficientRow.from_estimate(name, coef, se, t, p))
    return rows


class RobustnessAgent:
    def __init__(self, pipeline_config: PipelineConfig):
        from config import Config
        self.config = Config.get_stage_config("robustness")
        self.config.update(hac=pipeline_config.hac)

    async def estimate(self, dataset: Dataset) -> Tuple[RobustnessBlock, Dict[CointMethod, CointRegFit]]:
        """FMOLS and CCR long-run coefficients on the levels of the model variables"""
        y = dataset.dependent.as_array()
        X = np.column_stack([s.as_array() for s in dataset.regressors])
        names = list(dataset.roles.regressors)

        fits = {
            CointMethod.FMOLS: fmols(y, X, names, self.config["hac"], df_adjust=self.config["df_adjust"]),
            CointMethod.CCR: ccr(y, X, names, self.config["hac"], df_adjust=self.config["df_adjust"]),
        }

        warnings = [f"{method.value}: {w}" for method, fit in fits.items() for w in fit.warnings]
        for name, a, b in zip(names, fits[CointMethod.FMOLS].coefficients, fits[CointMethod.CCR].coefficients):
            if np.sign(a) != np.sign(b):
                warnings.append(f"FMOLS and CCR disagree on the sign of {name}")
        for message in warnings:
            logger.warning(message)

        block = RobustnessBlock(
            dependent=dataset.roles.dependent,
            bandwidth=fits[CointMethod.FMOLS].bandwidth,
            fmols=_rows(fits[CointMethod.FMOLS]),
            ccr=_rows(fits[CointMethod.CCR]),
            warnings=warnings,
        )
        return block, fits
