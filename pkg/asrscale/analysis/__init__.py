from .outcomes import StrategyOutcome, outcomes_from_runs, samples_from_runs
from .pareto import dominates, pareto_frontier
from .compare import ComparisonRow, TestSetComparison, compare_strategies, compare_test_sets
from .convergence import ConvergencePolicy, detect_convergence, first_below, read_curve_csv
from .decomposition import StageCostFit, stage_cost_decomposition
