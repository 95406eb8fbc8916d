from .tokens import TokenCounts, token_budget
from .adapters import adapter_params, module_adapter_params
from .cost_model import (
    FLOPS_UNIT, ChainLink, CostModelConfig, FlopsBreakdown, PhaseFlops,
    StrategyFlops, chain_flops, stage_flops, stage_links, strategy_flops
)
