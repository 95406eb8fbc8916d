from dataclasses import dataclass
import logging
import math
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .power_law import PowerLawFit, SamplePoint

logger = logging.getLogger(__name__)

SPACES = ("log", "linear")


@dataclass(frozen=True)
class RSquared:
    """
    A coefficient of determination; value is NaN when degenerate
    """

    value: float
    space: str
    skipped: int = 0
    degenerate: bool = False


def r_squared(fit: "PowerLawFit", points: Sequence["SamplePoint"], space: str = "log") -> RSquared:
    """
    1 - SS_res / SS_tot of a fit over samples. In log space both the
    observed and the predicted errors are taken as ln(value - l_infinity);
    observations at or below l_infinity are skipped and counted.

    :param fit: the fit
    :param points: at least two samples
    :param space: "log" or "linear"
    :returns: the RSquared
    """

    if space not in SPACES:
        raise ValueError(f"Unknown R^2 space {space}; expected one of {SPACES}")
    if len(points) < 2:
        raise ValueError(f"R^2 needs at least 2 points, got {len(points)}")

    x = np.array([p.budget for p in points], dtype=np.float64)
    y = np.array([p.error for p in points], dtype=np.float64)
    predicted = fit.l_infinity + fit.beta * np.power(x, fit.alpha)

    skipped: int = 0
    if space == "log":
        keep = y > fit.l_infinity
        skipped = int(np.count_nonzero(~keep))
        if skipped:
            logger.warning(f"{skipped} point(s) at or below l_infinity = {fit.l_infinity} skipped for log-space R^2")
        if fit.degenerate or np.count_nonzero(keep) < 2:
            return RSquared(math.nan, space, skipped, True)

        y = np.log(y[keep] - fit.l_infinity)
        predicted = np.log(predicted[keep] - fit.l_infinity)

    ss_tot: float = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return RSquared(math.nan, space, skipped, True)

    ss_res: float = float(np.sum((y - predicted) ** 2))
    return RSquared(1.0 - ss_res / ss_tot, space, skipped)
