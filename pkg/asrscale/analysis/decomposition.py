from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from asrscale.core.errors import ConfigurationError, DegenerateFitError

from .outcomes import StrategyOutcome

HOURS_UNIT = 1000.0


@dataclass(frozen=True)
class StageCostFit:
    strategy_id: str
    slope: float
    intercept: float
    residual_max_relative: float


def stage_cost_decomposition(runs: Sequence[StrategyOutcome]) -> StageCostFit:
    """
    Split a strategy's total FLOPs into a per-data cost and a fixed cost by
    least squares of total FLOPs on data hours. The fixed cost holds stages
    run once regardless of scale, such as the encoder fine-tune.

    :param runs: one strategy's outcomes at two or more data scales
    :returns: slope in 10^15 FLOPs per 1000 hours, intercept in 10^15 FLOPs
              and the largest |fit - observed| / observed
    """

    ids = {r.strategy_id for r in runs}
    if len(ids) > 1:
        raise ConfigurationError(f"Decomposition takes one strategy, got {sorted(ids)}")

    hours = np.array([r.data_hours for r in runs], dtype=np.float64) / HOURS_UNIT
    flops = np.array([r.total_flops for r in runs], dtype=np.float64)
    if len(np.unique(hours)) < 2:
        raise DegenerateFitError("Decomposition needs at least two distinct data scales")

    result = stats.linregress(hours, flops)
    fitted = result.intercept + result.slope * hours
    residual = float(np.max(np.abs(fitted - flops) / flops))

    return StageCostFit(runs[0].strategy_id, float(result.slope), float(result.intercept), residual)
