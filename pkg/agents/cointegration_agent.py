from typing import Tuple

from econometrics.ardl import bounds_f, select_ardl
from models.schemas import ArdlSpec, BoundsBlock, BoundsResult, Dataset, PipelineConfig


class CointegrationAgent:
    def __init__(self, pipeline_config: PipelineConfig):
        from config import Config
        self.config = Config.get_stage_config("cointegration")
        self.config.update(
            max_p=pipeline_config.max_p,
            max_q=pipeline_config.max_q,
            criterion=pipeline_config.criterion,
            workers=pipeline_config.workers,
            significance=pipeline_config.significance,
            bounds_case=pipeline_config.bounds_case,
        )

    async def select_and_test(self, dataset: Dataset) -> Tuple[BoundsBlock, ArdlSpec, BoundsResult]:
        """Pick the ARDL lag structure on the grid, then run the bounds F test on it"""
        spec = select_ardl(
            dataset,
            max_p=self.config["max_p"],
            max_q=self.config["max_q"],
            criterion=self.config["criterion"],
            workers=self.config["workers"],
        )
        result = bounds_f(spec, dataset, case=self.config["bounds_case"])

        block = BoundsBlock(
            model=f"{spec.dep} = f({', '.join(spec.regressors)})",
            criterion=spec.criterion,
            lags=list(spec.lags),
            f_stat=result.f_stat,
            stars=result.stars,
            k=result.k,
            case=result.case,
            bounds={level: list(pair) for level, pair in result.bounds.items()},
            decision=dict(result.decision),
            significance=self.config["significance"],
        )
        return block, spec, result
