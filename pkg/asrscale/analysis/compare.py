from dataclasses import dataclass
from typing import List, Sequence

from asrscale.core.errors import ConfigurationError
from asrscale.metrics.cer import relative_reduction
from asrscale.store.records import RunRecord

from .outcomes import StrategyOutcome


@dataclass(frozen=True)
class ComparisonRow:
    strategy_id: str
    data_hours: float
    avg_cer: float
    total_flops: float
    cerr: float
    flops_ratio: float


@dataclass(frozen=True)
class TestSetComparison:
    set_name: str
    data_hours: float
    baseline_cer: float
    candidate_cer: float
    cerr: float

    __test__ = False


def _baseline_for(baselines: List, data_hours: float, baseline_id: str):
    if len(baselines) == 1:
        return baselines[0]

    matching = [b for b in baselines if b.data_hours == data_hours]
    if len(matching) != 1:
        raise ConfigurationError(f"Expected one {baseline_id} result at {data_hours} hours, found {len(matching)}")

    return matching[0]


def compare_strategies(outcomes: Sequence[StrategyOutcome], baseline_id: str) -> List[ComparisonRow]:
    """
    CERR and FLOPs ratio of every outcome against a baseline strategy, on
    unrounded values. With several baseline outcomes each row is compared
    to the baseline at its own data scale.

    :param outcomes: the outcomes, baseline included
    :param baseline_id: the baseline strategy id
    :returns: one row per outcome, in input order
    """

    baselines = [o for o in outcomes if o.strategy_id == baseline_id]
    if not baselines:
        raise ConfigurationError(f"Baseline {baseline_id} not among the outcomes")

    rows: List[ComparisonRow] = []
    for o in outcomes:
        base = _baseline_for(baselines, o.data_hours, baseline_id)
        rows.append(ComparisonRow(o.strategy_id, o.data_hours, o.avg_cer, o.total_flops,
                                  relative_reduction(base.avg_cer, o.avg_cer),
                                  o.total_flops / base.total_flops))

    return rows


def compare_test_sets(records: Sequence[RunRecord], baseline_id: str, candidate_id: str) -> List[TestSetComparison]:
    """
    Per-test-set CERR of a candidate strategy against a baseline, matched by
    data scale

    :param records: runs of both strategies
    :param baseline_id: the baseline strategy id
    :param candidate_id: the candidate strategy id
    :returns: one entry per (scale, test set) in the candidate's order
    """

    baselines = [r for r in records if r.strategy_id == baseline_id]
    candidates = [r for r in records if r.strategy_id == candidate_id]
    if not baselines:
        raise ConfigurationError(f"Baseline {baseline_id} not among the runs")
    if not candidates:
        raise ConfigurationError(f"Candidate {candidate_id} not among the runs")

    result: List[TestSetComparison] = []
    for c in candidates:
        base: RunRecord = _baseline_for(baselines, c.data_hours, baseline_id)
        for s in c.scores:
            try:
                base_cer = base.score(s.set_name)
            except KeyError:
                raise ConfigurationError(f"Baseline {baseline_id} has no score for {s.set_name}") from None
            result.append(TestSetComparison(s.set_name, c.data_hours, base_cer, s.cer,
                                            relative_reduction(base_cer, s.cer)))

    return result
