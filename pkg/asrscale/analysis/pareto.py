from itertools import groupby
import math
from typing import List, Sequence

from .outcomes import StrategyOutcome


def dominates(a: StrategyOutcome, b: StrategyOutcome) -> bool:
    return (a.total_flops <= b.total_flops and a.avg_cer <= b.avg_cer
            and (a.total_flops < b.total_flops or a.avg_cer < b.avg_cer))


def pareto_frontier(outcomes: Sequence[StrategyOutcome]) -> List[StrategyOutcome]:
    """
    The outcomes no other outcome dominates on (FLOPs, CER). Exact
    duplicates are all kept.

    :param outcomes: the candidates
    :returns: the frontier sorted by total FLOPs ascending, ties in input order
    """

    ordered = sorted(outcomes, key=lambda o: (o.total_flops, o.avg_cer))

    frontier: List[StrategyOutcome] = []
    best_cer: float = math.inf
    for _, same_flops in groupby(ordered, key=lambda o: o.total_flops):
        group = list(same_flops)
        lowest: float = group[0].avg_cer
        if lowest < best_cer:
            frontier.extend(o for o in group if o.avg_cer == lowest)
            best_cer = lowest

    return frontier
