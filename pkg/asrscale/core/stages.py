from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Optional, Tuple

import asrscale.config_manager as cm

from .architecture import ENCODER, LANGUAGE_MODEL, PROJECTION
from .errors import ConfigurationError


class StageKind(Enum):
    EncoderFinetune = "encoder-finetune"
    Alignment = "alignment"
    LLMAdaptation = "llm-adaptation"
    FullJoint = "full-joint"


# stages may only appear in this order
STAGE_ORDER: Tuple[StageKind, ...] = (StageKind.EncoderFinetune, StageKind.Alignment,
                                      StageKind.LLMAdaptation, StageKind.FullJoint)


class Convergence(Enum):
    Preliminary = "preliminary"
    Full = "full"


@dataclass(frozen=True)
class DatasetSpec:
    hours: float = 10_000.0
    frame_rate: float = field(default_factory=lambda: cm.get("FRAME_RATE"))
    downsample: int = field(default_factory=lambda: cm.get("DOWNSAMPLE"))
    text_tokens_per_second: float = field(default_factory=lambda: cm.get("TEXT_TOKENS_PER_SECOND"))
    epochs: float = field(default_factory=lambda: cm.get("EPOCHS"))

    def __post_init__(self):
        if self.hours < 0:
            raise ConfigurationError(f"Dataset hours must be non-negative, got {self.hours}")
        if self.frame_rate <= 0:
            raise ConfigurationError(f"Dataset frame_rate must be positive, got {self.frame_rate}")
        if int(self.downsample) != self.downsample or self.downsample < 1:
            raise ConfigurationError(f"Dataset downsample must be an integer >= 1, got {self.downsample}")
        if self.text_tokens_per_second < 0:
            raise ConfigurationError(f"Dataset text_tokens_per_second must be non-negative, got {self.text_tokens_per_second}")
        if self.epochs <= 0:
            raise ConfigurationError(f"Dataset epochs must be positive, got {self.epochs}")

    def with_hours(self, hours: float) -> "DatasetSpec":
        return replace(self, hours=hours)


@dataclass(frozen=True, order=True)
class TrainableModule:
    """
    Marks which weights of a module a stage updates
    """

    module: str
    base: bool
    adapter: bool


def canonical_trainable(kind: StageKind) -> FrozenSet[TrainableModule]:
    """
    Get the trainable set implied by a stage kind, using the canonical
    module names

    :param kind: the stage kind
    :returns: the set of TrainableModule entries
    """

    if kind is StageKind.EncoderFinetune:
        return frozenset({TrainableModule(ENCODER, True, False)})
    if kind is StageKind.Alignment:
        return frozenset({TrainableModule(PROJECTION, True, False)})
    if kind is StageKind.LLMAdaptation:
        return frozenset({TrainableModule(PROJECTION, True, False),
                          TrainableModule(LANGUAGE_MODEL, False, True)})
    if kind is StageKind.FullJoint:
        return frozenset({TrainableModule(ENCODER, True, False),
                          TrainableModule(PROJECTION, True, False),
                          TrainableModule(LANGUAGE_MODEL, False, True)})

    raise ConfigurationError(f"Unknown stage kind {kind}")


@dataclass(frozen=True)
class StageSpec:
    kind: StageKind
    trainable: FrozenSet[TrainableModule]
    convergence: Convergence = Convergence.Full
    dataset: DatasetSpec = field(default_factory=DatasetSpec)

    def __post_init__(self):
        object.__setattr__(self, "trainable", frozenset(self.trainable))

        if not isinstance(self.kind, StageKind):
            raise ConfigurationError(f"Unknown stage kind {self.kind!r}")
        if not isinstance(self.convergence, Convergence):
            raise ConfigurationError(f"Unknown convergence policy {self.convergence!r}")

    def entry(self, module: str) -> Optional[TrainableModule]:
        """
        Get the trainable entry for a module

        :param module: the module name
        :returns: the entry, or None if the module is frozen in this stage
        """

        for t in self.trainable:
            if t.module == module:
                return t

        return None


def make_stage(kind: StageKind,
               convergence: Convergence = Convergence.Full,
               dataset: Optional[DatasetSpec] = None) -> StageSpec:
    return StageSpec(kind, canonical_trainable(kind), convergence, dataset or DatasetSpec())
