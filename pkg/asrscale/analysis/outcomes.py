from dataclasses import dataclass
import math
from typing import Dict, List, Sequence

from asrscale.core.errors import ConfigurationError
from asrscale.fitting.power_law import SamplePoint
from asrscale.metrics.cer import average_cer
from asrscale.store.records import RunRecord

GROUP_KEYS = ("strategy", "encoder")


@dataclass(frozen=True)
class StrategyOutcome:
    """
    A strategy's result at one data scale: average CER (percent) and total
    training FLOPs (units of 10^15)
    """

    strategy_id: str
    data_hours: float
    avg_cer: float
    total_flops: float

    def __post_init__(self):
        if not (math.isfinite(self.total_flops) and self.total_flops > 0):
            raise ConfigurationError(f"Outcome {self.strategy_id}: total_flops must be positive, got {self.total_flops}")
        if not (math.isfinite(self.avg_cer) and self.avg_cer > 0):
            raise ConfigurationError(f"Outcome {self.strategy_id}: avg_cer must be positive, got {self.avg_cer}")


def outcomes_from_runs(records: Sequence[RunRecord]) -> List[StrategyOutcome]:
    """
    Average the unrounded per-test-set scores of each run

    :param records: the runs
    :returns: one outcome per run, in input order
    """

    return [StrategyOutcome(r.strategy_id, r.data_hours, average_cer(r.scores), r.total_flops) for r in records]


def samples_from_runs(records: Sequence[RunRecord], by: str = "strategy") -> Dict[str, List[SamplePoint]]:
    """
    Group runs into (total FLOPs, average CER) samples for fitting, one group
    per strategy or per encoder

    :param records: the runs
    :param by: "strategy" or "encoder"
    :returns: label -> samples, labels in order of first appearance
    """

    if by not in GROUP_KEYS:
        raise ConfigurationError(f"Unknown grouping {by}; expected one of {GROUP_KEYS}")

    groups: Dict[str, List[SamplePoint]] = {}
    for r in records:
        label: str = r.strategy_id if by == "strategy" else r.encoder_tag
        groups.setdefault(label, []).append(SamplePoint(r.total_flops, average_cer(r.scores)))

    return groups
