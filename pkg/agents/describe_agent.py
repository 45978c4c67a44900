from models.schemas import Dataset, DescriptiveBlock, DescriptiveRow
from econometrics.timeseries import describe_all


class DescribeAgent:
    async def describe(self, dataset: Dataset) -> DescriptiveBlock:
        """Summary statistics of the model variables, dependent first"""
        rows = [
            DescriptiveRow(symbol=s.name, obs=s.obs, mean=s.mean, std=s.std, min=s.min, max=s.max)
            for s in describe_all(dataset)
            if s.name in dataset.model_names
        ]
        return DescriptiveBlock(rows=rows)
