from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import asrscale.config_manager as cm
from asrscale.core.architecture import ArchitectureGraph, ModuleRole, ModuleSpec
from asrscale.core.errors import ConfigurationError
from asrscale.core.stages import StageKind, StageSpec, TrainableModule
from asrscale.core.strategies import StrategySpec, validate_strategy

from .adapters import module_adapter_params
from .tokens import TokenCounts, token_budget

logger = logging.getLogger(__name__)

# breakdown entries are reported in units of 10^15 FLOPs
FLOPS_UNIT: float = 1e15


@dataclass(frozen=True)
class CostModelConfig:
    """
    FLOPs charged per parameter per token for each training phase
    """

    c_fwd: float = field(default_factory=lambda: cm.get("C_FWD"))
    c_act_bwd: float = field(default_factory=lambda: cm.get("C_ACT_BWD"))
    c_wgrad: float = field(default_factory=lambda: cm.get("C_WGRAD"))

    def __post_init__(self):
        for name in ("c_fwd", "c_act_bwd", "c_wgrad"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"Cost model constant {name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class PhaseFlops:
    forward: float
    activation_backward: float
    weight_gradient: float

    @property
    def total(self) -> float:
        return math.fsum((self.forward, self.activation_backward, self.weight_gradient))


@dataclass(frozen=True)
class FlopsBreakdown:
    per_module: Dict[str, PhaseFlops]
    total: float

    @staticmethod
    def from_modules(per_module: Dict[str, PhaseFlops]) -> "FlopsBreakdown":
        total: float = math.fsum(v for p in per_module.values()
                                 for v in (p.forward, p.activation_backward, p.weight_gradient))
        return FlopsBreakdown(dict(per_module), total)

    def phase_total(self, phase: str) -> float:
        return math.fsum(getattr(p, phase) for p in self.per_module.values())


@dataclass(frozen=True)
class ChainLink:
    """
    One module on the forward path as seen by the cost model
    """

    name: str
    effective_params: int
    trainable_params: int
    tokens: int


@dataclass(frozen=True)
class StrategyFlops:
    total: float
    stages: Tuple[FlopsBreakdown, ...]


def chain_flops(links: Sequence[ChainLink], cost: CostModelConfig, unit: float = FLOPS_UNIT) -> FlopsBreakdown:
    """
    Apply the cost model to a chain of modules in dataflow order. Every
    module pays the forward pass; modules at or after the first trainable
    one also pay the activation backward pass; only trainable parameters
    pay the weight gradient.

    :param links: the modules in forward order
    :param cost: the per-parameter-token constants
    :param unit: divisor applied to every entry
    :returns: the FlopsBreakdown
    """

    first_trainable: Optional[int] = next((i for i, l in enumerate(links) if l.trainable_params > 0), None)

    per_module: Dict[str, PhaseFlops] = {}
    for i, link in enumerate(links):
        forward: float = cost.c_fwd * link.effective_params * link.tokens
        act_bwd: float = 0.0
        if first_trainable is not None and i >= first_trainable:
            act_bwd = cost.c_act_bwd * link.effective_params * link.tokens
        wgrad: float = cost.c_wgrad * link.trainable_params * link.tokens

        per_module[link.name] = PhaseFlops(forward / unit, act_bwd / unit, wgrad / unit)

    return FlopsBreakdown.from_modules(per_module)


def _module_tokens(module: ModuleSpec, tokens: TokenCounts) -> int:
    if module.role is ModuleRole.SpeechEncoder:
        return tokens.encoder_tokens
    if module.role is ModuleRole.Projection:
        return tokens.llm_speech_tokens

    return tokens.llm_tokens


def stage_links(stage: StageSpec, arch: ArchitectureGraph) -> List[ChainLink]:
    """
    Map a stage onto the cost-model chain of its architecture

    :param stage: the stage
    :param arch: the architecture the stage trains
    :returns: the chain links in dataflow order
    """

    for t in stage.trainable:
        module: ModuleSpec = arch.module(t.module)
        if t.adapter and module.adapter is None:
            raise ConfigurationError(f"Stage {stage.kind.value} trains an adapter on module '{t.module}' which has none")

    tokens: TokenCounts = token_budget(stage.dataset)

    modules: Sequence[ModuleSpec] = arch.modules
    if stage.kind is StageKind.EncoderFinetune:
        # the encoder is fine-tuned on its own, outside the LLM-ASR graph
        modules = [arch.by_role(ModuleRole.SpeechEncoder)]

    links: List[ChainLink] = []
    for module in modules:
        entry: Optional[TrainableModule] = stage.entry(module.name)
        # an attached adapter sits on the forward path whether or not it trains
        adapter: int = module_adapter_params(module)

        trainable: int = 0
        if entry is not None:
            trainable = (module.param_count if entry.base else 0) + (adapter if entry.adapter else 0)

        links.append(ChainLink(module.name, module.param_count + adapter, trainable, _module_tokens(module, tokens)))

    return links


def stage_flops(stage: StageSpec, arch: ArchitectureGraph, cost: Optional[CostModelConfig] = None) -> FlopsBreakdown:
    """
    Estimate the training FLOPs of one stage

    :param stage: the stage
    :param arch: the architecture
    :param cost: the cost model, defaults to 2/2/2
    :returns: the FlopsBreakdown in units of 10^15 FLOPs
    """

    return chain_flops(stage_links(stage, arch), cost or CostModelConfig())


def strategy_flops(strategy: StrategySpec, arch: ArchitectureGraph, cost: Optional[CostModelConfig] = None) -> StrategyFlops:
    """
    Estimate the training FLOPs of every stage of a strategy

    :param strategy: a valid strategy
    :param arch: the architecture
    :param cost: the cost model, defaults to 2/2/2
    :returns: the total and the per-stage breakdowns in stage order
    """

    result = validate_strategy(strategy, arch)
    if not result.ok:
        raise ConfigurationError(f"Strategy {strategy.id} is invalid: {'; '.join(str(v) for v in result.violations)}")

    stages: Tuple[FlopsBreakdown, ...] = tuple(stage_flops(s, arch, cost) for s in strategy.stages)
    total: float = sum(s.total for s in stages)
    logger.debug(f"strategy {strategy.id}: {total} x 10^15 FLOPs over {len(stages)} stages")

    return StrategyFlops(total, stages)
