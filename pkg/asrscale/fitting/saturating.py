from dataclasses import dataclass, field, replace
import logging
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

import asrscale.config_manager as cm

from .goodness import r_squared
from .power_law import FitMethod, PowerLawFit, SamplePoint, _check_points, as_arrays

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SaturatingGrid:
    """
    The L-infinity candidates searched before polishing: size evenly spaced
    values in [0, min(error) * (1 - epsilon)]
    """

    size: int = field(default_factory=lambda: cm.get("GRID_SIZE"))
    epsilon: float = field(default_factory=lambda: cm.get("GRID_EPSILON"))
    polish: bool = True

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"Grid size must be at least 2, got {self.size}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"Grid epsilon must be in (0, 1), got {self.epsilon}")

    def candidates(self, min_error: float) -> np.ndarray:
        return np.linspace(0.0, min_error * (1.0 - self.epsilon), self.size)


def _grid_search(x: np.ndarray, y: np.ndarray, grid: np.ndarray):
    """
    Log-log OLS of (y - c) on x for every candidate c at once

    :returns: (index of the best candidate, alphas, betas, r2 per candidate)
    """

    lx = np.log(x)
    ly = np.log(y[None, :] - grid[:, None])

    dx = lx - lx.mean()
    ly_mean = ly.mean(axis=1, keepdims=True)
    slopes = (ly - ly_mean) @ dx / (dx @ dx)
    intercepts = ly_mean[:, 0] - slopes * lx.mean()

    residuals = ly - (intercepts[:, None] + slopes[:, None] * lx[None, :])
    ss_res = np.sum(residuals ** 2, axis=1)
    ss_tot = np.sum((ly - ly_mean) ** 2, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0, 1.0 - ss_res / ss_tot, -np.inf)

    # argmax keeps the first maximum, i.e. the smallest L-infinity on ties
    best: int = int(np.argmax(r2))
    return best, slopes, np.exp(intercepts), r2


def fit_saturating_power_law(points: Sequence[SamplePoint], grid: Optional[SaturatingGrid] = None) -> PowerLawFit:
    """
    Fit error = l_infinity + beta * budget ** alpha by a grid search over
    l_infinity followed by an optional joint least-squares polish

    :param points: at least three samples
    :param grid: the search configuration
    :returns: the PowerLawFit; constant data yields a degenerate fit
    """

    grid = grid or SaturatingGrid()
    _check_points(points, 3)
    x, y = as_arrays(points)

    if np.all(y == y[0]):
        logger.warning(f"All errors equal {y[0]}; returning a degenerate fit")
        return PowerLawFit(alpha=0.0, beta=0.0, l_infinity=float(y[0]), method=FitMethod.LogLogOLS,
                           n_points=len(points), degenerate=True)

    min_error: float = float(y.min())
    candidates = grid.candidates(min_error)
    best, alphas, betas, r2 = _grid_search(x, y, candidates)
    l_inf, alpha, beta = float(candidates[best]), float(alphas[best]), float(betas[best])
    logger.debug(f"grid search: L_inf = {l_inf}, alpha = {alpha}, beta = {beta}, r2_log = {r2[best]}")

    method: FitMethod = FitMethod.LogLogOLS
    if grid.polish:
        def residuals(params: np.ndarray) -> np.ndarray:
            return params[0] + params[1] * np.power(x, params[2]) - y

        def jacobian(params: np.ndarray) -> np.ndarray:
            power = np.power(x, params[2])
            return np.column_stack((np.ones_like(x), power, params[1] * power * np.log(x)))

        solution = least_squares(residuals, np.array([l_inf, beta, alpha]), jac=jacobian, method="trf",
                                 bounds=([0.0, 0.0, -np.inf], [min_error, np.inf, np.inf]),
                                 x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                 max_nfev=50 * cm.get("NONLINEAR_MAX_ITER"))
        logger.debug(f"polish: {solution.nfev} evaluations, status {solution.status}")

        if solution.cost <= 0.5 * float(np.sum(residuals(np.array([l_inf, beta, alpha])) ** 2)):
            l_inf, beta, alpha = (float(v) for v in solution.x)
            method = FitMethod.NonlinearLS

    fit = PowerLawFit(alpha=alpha, beta=beta, l_infinity=l_inf, method=method, n_points=len(points))
    return replace(fit,
                   r2_log=r_squared(fit, points, "log").value,
                   r2_linear=r_squared(fit, points, "linear").value)
