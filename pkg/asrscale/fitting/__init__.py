from .goodness import RSquared, r_squared
from .power_law import (
    FitMethod, PowerLawFit, SamplePoint, fit_groups, fit_power_law,
    predict_error, required_budget
)
from .saturating import SaturatingGrid, fit_saturating_power_law
