from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import asrscale.config_manager as cm

from .errors import ConfigurationError


class ModuleRole(Enum):
    SpeechEncoder = "speech-encoder"
    Projection = "projection"
    LanguageModel = "language-model"


class ScalingVariable(Enum):
    """
    The resource a scaling law is expressed in
    """

    N = "model-size"
    D = "data-size"
    B = "compute-budget"


# forward-dataflow order of the three roles
ROLE_ORDER: Tuple[ModuleRole, ...] = (ModuleRole.SpeechEncoder, ModuleRole.Projection, ModuleRole.LanguageModel)

# canonical module names used by the built-in strategies
ENCODER: str = "speech_encoder"
PROJECTION: str = "projection"
LANGUAGE_MODEL: str = "llm"

DEFAULT_NAMES: Dict[ModuleRole, str] = {
    ModuleRole.SpeechEncoder: ENCODER,
    ModuleRole.Projection: PROJECTION,
    ModuleRole.LanguageModel: LANGUAGE_MODEL,
}


@dataclass(frozen=True)
class AdapterSpec:
    """
    A low-rank adapter attached to every layer of a module. Only its
    parameter count matters here.
    """

    rank: int
    alpha: float
    targets_per_layer: int
    layer_count: int
    target_dims: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "target_dims", tuple((int(d_in), int(d_out)) for d_in, d_out in self.target_dims))

        if self.rank < 1:
            raise ConfigurationError(f"Adapter rank must be >= 1, got {self.rank}")
        if self.alpha <= 0:
            raise ConfigurationError(f"Adapter alpha must be positive, got {self.alpha}")
        if self.layer_count < 1:
            raise ConfigurationError(f"Adapter layer_count must be >= 1, got {self.layer_count}")
        if self.targets_per_layer != len(self.target_dims):
            raise ConfigurationError(f"targets_per_layer is {self.targets_per_layer} but {len(self.target_dims)} target_dims were given")
        for d_in, d_out in self.target_dims:
            if d_in < 1 or d_out < 1:
                raise ConfigurationError(f"Adapter target dims must be positive, got ({d_in}, {d_out})")


@dataclass(frozen=True)
class ModuleSpec:
    name: str
    role: ModuleRole
    param_count: int
    adapter: Optional[AdapterSpec] = None

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("Module name must be non-empty")
        if self.param_count <= 0:
            raise ConfigurationError(f"Module {self.name} param_count must be positive, got {self.param_count}")


@dataclass(frozen=True)
class ArchitectureGraph:
    """
    The encoder -> projection -> language-model chain. The prompt P and
    transcript T enter at the language model, the speech features S at the
    encoder, and the transcription Y leaves the language model.
    """

    modules: Tuple[ModuleSpec, ...]
    channel_roles: Dict[str, ModuleRole] = field(default_factory=lambda: {
        "P": ModuleRole.LanguageModel,
        "S": ModuleRole.SpeechEncoder,
        "E_s": ModuleRole.Projection,
        "T": ModuleRole.LanguageModel,
        "Y": ModuleRole.LanguageModel,
    })

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))

        roles = tuple(m.role for m in self.modules)
        if roles != ROLE_ORDER:
            raise ConfigurationError(f"Architecture must hold exactly one module per role in order "
                                     f"{[r.value for r in ROLE_ORDER]}, got {[r.value for r in roles]}")

        names = [m.name for m in self.modules]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"Duplicate module names in {names}")

    def module(self, name: str) -> ModuleSpec:
        """
        Get a module by name

        :param name: the module name
        :returns: the ModuleSpec
        """

        for m in self.modules:
            if m.name == name:
                return m

        raise ConfigurationError(f"Unknown module '{name}'; architecture has {[m.name for m in self.modules]}")

    def by_role(self, role: ModuleRole) -> ModuleSpec:
        for m in self.modules:
            if m.role is role:
                return m

        raise ConfigurationError(f"No module with role {role.value}")

    def position(self, name: str) -> int:
        """
        Get the index of a module in forward-dataflow order

        :param name: the module name
        :returns: 0 for the encoder, 2 for the language model
        """

        return self.modules.index(self.module(name))

    def role_names(self) -> Dict[str, ModuleRole]:
        return {m.name: m.role for m in self.modules}


QWEN_LIKE_TARGET_DIMS: Tuple[Tuple[int, int], ...] = (
    (3584, 3584),   # q_proj
    (3584, 512),    # k_proj
    (3584, 512),    # v_proj
    (3584, 3584),   # o_proj
    (3584, 18944),  # gate_proj
    (3584, 18944),  # up_proj
    (18944, 3584),  # down_proj
)


def default_adapter(layer_count: int = 28,
                    target_dims: Tuple[Tuple[int, int], ...] = QWEN_LIKE_TARGET_DIMS) -> AdapterSpec:
    return AdapterSpec(rank=cm.get("ADAPTER_RANK"),
                       alpha=cm.get("ADAPTER_ALPHA"),
                       targets_per_layer=len(target_dims),
                       layer_count=layer_count,
                       target_dims=target_dims)


def default_architecture() -> ArchitectureGraph:
    """
    Whisper-medium-like encoder, a two-layer projection (4096 -> 3584 -> 3584)
    and a Qwen2.5-7B-like language model with a rank-64 adapter on seven
    projections per layer. Parameter counts are declared values, the encoder's
    approximate.

    :returns: the ArchitectureGraph
    """

    projection_params: int = (4096 * 3584 + 3584) + (3584 * 3584 + 3584)

    return ArchitectureGraph((
        ModuleSpec(ENCODER, ModuleRole.SpeechEncoder, 307_000_000),
        ModuleSpec(PROJECTION, ModuleRole.Projection, projection_params),
        ModuleSpec(LANGUAGE_MODEL, ModuleRole.LanguageModel, 7_615_616_512, default_adapter()),
    ))
