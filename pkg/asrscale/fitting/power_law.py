from dataclasses import asdict, dataclass, replace
from enum import Enum
import json
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats
from scipy.optimize import least_squares

import asrscale.config_manager as cm
from asrscale.core.architecture import ScalingVariable
from asrscale.core.errors import FitError, NonInvertibleFitError, UnattainableTargetError

from .goodness import r_squared

logger = logging.getLogger(__name__)


class FitMethod(Enum):
    LogLogOLS = "loglog-ols"
    NonlinearLS = "nonlinear-ls"


@dataclass(frozen=True)
class SamplePoint:
    """
    One (budget, error) observation. Budgets are in units of 10^15 FLOPs
    when the scaling variable is compute; errors are CER in percent.
    """

    budget: float
    error: float

    def __post_init__(self):
        if not (math.isfinite(self.budget) and self.budget > 0):
            raise FitError(f"Sample budget must be positive, got {self.budget}")
        if not (math.isfinite(self.error) and self.error > 0):
            raise FitError(f"Sample error must be positive, got {self.error}")


@dataclass(frozen=True)
class PowerLawFit:
    """
    L(x) = l_infinity + beta * x ** alpha. A degenerate fit (constant data)
    has alpha = 0, beta = 0 and l_infinity equal to the constant.
    """

    alpha: float
    beta: float
    l_infinity: float = 0.0
    method: FitMethod = FitMethod.LogLogOLS
    r2_log: float = math.nan
    r2_linear: float = math.nan
    n_points: int = 0
    degenerate: bool = False
    scaling_variable: ScalingVariable = ScalingVariable.B

    def __post_init__(self):
        if not self.degenerate and not self.beta > 0:
            raise FitError(f"Power-law coefficient beta must be positive, got {self.beta}")
        if self.l_infinity < 0:
            raise FitError(f"Irreducible loss must be non-negative, got {self.l_infinity}")

    def curve(self, budgets: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        x = np.asarray(budgets, dtype=np.float64)
        return self.l_infinity + self.beta * np.power(x, self.alpha)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = asdict(self)
        d["method"] = self.method.value
        d["scaling_variable"] = self.scaling_variable.name
        return d

    def to_json(self) -> str:
        # repr-precision floats; NaN r2 values are written as null
        d = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in self.to_dict().items()}
        return json.dumps(d, indent=2)

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "PowerLawFit":
        try:
            return PowerLawFit(
                alpha=float(d["alpha"]),
                beta=float(d["beta"]),
                l_infinity=float(d.get("l_infinity", 0.0) or 0.0),
                method=FitMethod(d.get("method", FitMethod.LogLogOLS.value)),
                r2_log=math.nan if d.get("r2_log") is None else float(d["r2_log"]),
                r2_linear=math.nan if d.get("r2_linear") is None else float(d["r2_linear"]),
                n_points=int(d.get("n_points", 0)),
                degenerate=bool(d.get("degenerate", False)),
                scaling_variable=ScalingVariable[d.get("scaling_variable", ScalingVariable.B.name)],
            )
        except (KeyError, ValueError, TypeError) as e:
            raise FitError(f"Invalid fit document: {e}") from None

    @staticmethod
    def from_json(text: str) -> "PowerLawFit":
        try:
            return PowerLawFit.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise FitError(f"Invalid fit document: {e.msg}") from None


def as_arrays(points: Sequence[SamplePoint]):
    x = np.array([p.budget for p in points], dtype=np.float64)
    y = np.array([p.error for p in points], dtype=np.float64)
    return x, y


def _check_points(points: Sequence[SamplePoint], minimum: int) -> None:
    if len(points) < minimum:
        raise FitError(f"Need at least {minimum} points to fit, got {len(points)}")

    budgets: List[float] = [p.budget for p in points]
    if len(set(budgets)) < 2:
        raise FitError("Need at least 2 distinct budgets to fit")
    if len(set(budgets)) != len(budgets):
        logger.warning(f"{len(budgets) - len(set(budgets))} duplicate budget(s) in fit input; all {len(budgets)} points are used")


def loglog_ols(x: np.ndarray, y: np.ndarray):
    """
    Ordinary least squares of ln(y) on ln(x)

    :returns: (alpha, beta)
    """

    result = stats.linregress(np.log(x), np.log(y))
    return float(result.slope), float(math.exp(result.intercept))


def fit_power_law(points: Sequence[SamplePoint], method: Optional[Union[FitMethod, str]] = None) -> PowerLawFit:
    """
    Fit error = beta * budget ** alpha

    :param points: at least two samples with two distinct budgets
    :param method: loglog-ols (closed form) or nonlinear-ls (least squares in
                   linear space, started from the loglog-ols solution);
                   defaults to the configured method
    :returns: the PowerLawFit with both R^2 values; constant data yields a
              degenerate fit
    """

    method = FitMethod(method or cm.get_default_fit_method())
    _check_points(points, 2)
    x, y = as_arrays(points)

    if np.all(y == y[0]):
        logger.warning(f"All errors equal {y[0]}; returning a degenerate fit")
        return PowerLawFit(alpha=0.0, beta=0.0, l_infinity=float(y[0]), method=method,
                           n_points=len(points), degenerate=True)

    alpha, beta = loglog_ols(x, y)

    if method is FitMethod.NonlinearLS:
        def residuals(params: np.ndarray) -> np.ndarray:
            return params[0] * np.power(x, params[1]) - y

        def jacobian(params: np.ndarray) -> np.ndarray:
            power = np.power(x, params[1])
            return np.column_stack((power, params[0] * power * np.log(x)))

        tol: float = cm.get("NONLINEAR_TOL")
        solution = least_squares(residuals, np.array([beta, alpha]), jac=jacobian, method="lm",
                                 xtol=tol, ftol=tol, gtol=tol, max_nfev=cm.get("NONLINEAR_MAX_ITER"))
        logger.debug(f"nonlinear-ls: {solution.nfev} evaluations, status {solution.status}")
        beta, alpha = float(solution.x[0]), float(solution.x[1])

    fit = PowerLawFit(alpha=alpha, beta=beta, method=method, n_points=len(points))
    return replace(fit,
                   r2_log=r_squared(fit, points, "log").value,
                   r2_linear=r_squared(fit, points, "linear").value)


def predict_error(fit: PowerLawFit, budget: float) -> float:
    """
    Evaluate a fit at a budget

    :param fit: the fit
    :param budget: must be positive
    :returns: l_infinity + beta * budget ** alpha
    """

    if not budget > 0:
        raise FitError(f"Budget must be positive, got {budget}")

    return fit.l_infinity + fit.beta * budget ** fit.alpha


def required_budget(fit: PowerLawFit, target_error: float) -> float:
    """
    Invert a fit: the budget at which it predicts target_error

    :param fit: a fit with alpha < 0
    :param target_error: must exceed the fit's irreducible loss
    :returns: ((target_error - l_infinity) / beta) ** (1 / alpha)
    """

    if not target_error > fit.l_infinity:
        raise UnattainableTargetError(f"Target error {target_error} is not above the irreducible loss {fit.l_infinity}")
    if fit.degenerate or not fit.alpha < 0:
        raise NonInvertibleFitError(f"Cannot invert a fit with alpha = {fit.alpha}")

    return ((target_error - fit.l_infinity) / fit.beta) ** (1.0 / fit.alpha)


def fit_groups(groups: Dict[str, Sequence[SamplePoint]],
               method: Optional[Union[FitMethod, str]] = None) -> Dict[str, PowerLawFit]:
    """
    Fit one curve per labelled group of samples, e.g. per strategy

    :param groups: label -> samples
    :param method: the fit method
    :returns: label -> fit, in the order of groups
    """

    return {label: fit_power_law(points, method) for label, points in groups.items()}
