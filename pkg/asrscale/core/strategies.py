from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .architecture import DEFAULT_NAMES, ArchitectureGraph
from .errors import ConfigurationError
from .stages import (
    STAGE_ORDER, Convergence, DatasetSpec, StageKind, StageSpec,
    TrainableModule, canonical_trainable, make_stage
)


@dataclass(frozen=True)
class StrategySpec:
    id: str
    stages: Tuple[StageSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.id:
            raise ConfigurationError("Strategy id must be non-empty")

    def kinds(self) -> List[StageKind]:
        return [s.kind for s in self.stages]


@dataclass(frozen=True)
class Violation:
    """
    One broken strategy invariant; stage_index is None for strategy-wide rules
    """

    invariant: str
    stage_index: Optional[int]

    def __str__(self) -> str:
        if self.stage_index is None:
            return self.invariant

        return f"stage {self.stage_index}: {self.invariant}"


@dataclass(frozen=True)
class ValidationResult:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def __bool__(self) -> bool:
        return self.ok


def _renamer(arch: ArchitectureGraph) -> Dict[str, str]:
    # canonical module name -> the architecture's own name, matched by role
    return {DEFAULT_NAMES[m.role]: m.name for m in arch.modules}


def trainable_for(kind: StageKind, arch: Optional[ArchitectureGraph] = None) -> frozenset:
    """
    The trainable set a stage of the given kind must have, spelled with
    the module names of arch (canonical names when arch is None)
    """

    canonical = canonical_trainable(kind)
    if arch is None:
        return canonical

    rename: Dict[str, str] = _renamer(arch)
    return frozenset(TrainableModule(rename.get(t.module, t.module), t.base, t.adapter) for t in canonical)


def for_architecture(spec: StrategySpec, arch: ArchitectureGraph) -> StrategySpec:
    """
    Rewrite the canonical module names in every trainable set of spec to
    the names arch uses for the same roles
    """

    rename: Dict[str, str] = _renamer(arch)
    stages = tuple(StageSpec(s.kind,
                             frozenset(TrainableModule(rename.get(t.module, t.module), t.base, t.adapter)
                                       for t in s.trainable),
                             s.convergence, s.dataset)
                   for s in spec.stages)
    return StrategySpec(spec.id, stages)


def validate_strategy(spec: StrategySpec, arch: Optional[ArchitectureGraph] = None) -> ValidationResult:
    """
    Check the ordering and trainable-set invariants of a strategy.
    Violations are returned, never raised.

    :param spec: the strategy to check
    :param arch: the architecture whose module names the trainable sets use;
                 canonical names are assumed when None
    :returns: a ValidationResult, truthy when there are no violations
    """

    violations: List[Violation] = []

    if len(spec.stages) == 0:
        return ValidationResult((Violation("stages non-empty", None),))

    finetune_indices = [i for i, s in enumerate(spec.stages) if s.kind is StageKind.EncoderFinetune]
    if len(finetune_indices) > 1:
        violations.append(Violation("at most one encoder-finetune stage", finetune_indices[1]))
    for i in finetune_indices:
        if i != 0:
            violations.append(Violation("encoder-finetune must be first", i))

    seen: Dict[StageKind, int] = {}
    last_rank: int = -1
    for i, stage in enumerate(spec.stages):
        rank: int = STAGE_ORDER.index(stage.kind)
        if stage.kind in seen:
            if stage.kind is not StageKind.EncoderFinetune:
                violations.append(Violation(f"stage kind {stage.kind.value} appears at most once", i))
        elif rank < last_rank:
            violations.append(Violation(f"stage kind {stage.kind.value} out of canonical order", i))
        seen.setdefault(stage.kind, i)
        last_rank = max(last_rank, rank)

        if stage.trainable != trainable_for(stage.kind, arch):
            violations.append(Violation(f"trainable set does not match stage kind {stage.kind.value}", i))

    return ValidationResult(tuple(violations))


def builtin_strategies(dataset: Optional[DatasetSpec] = None) -> List[StrategySpec]:
    """
    The six strategies compared in the study plus Strategy-5 with its
    alignment stage stopped at preliminary convergence

    :param dataset: the dataset every stage trains on, 10,000 hours by default
    :returns: the seven StrategySpec entries, S1 through S6 then S5-preliminary
    """

    d = dataset or DatasetSpec()

    ef = make_stage(StageKind.EncoderFinetune, dataset=d)
    align = make_stage(StageKind.Alignment, dataset=d)
    align_pre = make_stage(StageKind.Alignment, Convergence.Preliminary, d)
    adapt = make_stage(StageKind.LLMAdaptation, dataset=d)
    joint = make_stage(StageKind.FullJoint, dataset=d)

    return [
        StrategySpec("S1", (align,)),
        StrategySpec("S2", (align, adapt)),
        StrategySpec("S3", (align, adapt, joint)),
        StrategySpec("S4", (ef, align)),
        StrategySpec("S5", (ef, align, adapt)),
        StrategySpec("S6", (ef, align, adapt, joint)),
        StrategySpec("S5-preliminary", (ef, align_pre, adapt)),
    ]


def get_strategy(strategy_id: str, registry: Optional[List[StrategySpec]] = None) -> StrategySpec:
    for spec in registry if registry is not None else builtin_strategies():
        if spec.id == strategy_id:
            return spec

    raise ConfigurationError(f"Unknown strategy '{strategy_id}'")
