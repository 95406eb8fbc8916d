"""
Reading and writing the JSON configuration document:

.. code-block:: json

   {
     "modules": [{"name": "llm", "role": "language-model", "param_count": 7615616512,
                  "adapter": {"rank": 64, "alpha": 16, "targets_per_layer": 1,
                              "layer_count": 28, "target_dims": [[3584, 3584]]}}],
     "cost_model": {"c_fwd": 2, "c_act_bwd": 2, "c_wgrad": 2},
     "strategies": [{"id": "S1", "stages": [{"kind": "alignment", "convergence": "full",
                                             "dataset": {"hours": 10000}}]}]
   }

A stage without ``trainable`` gets the canonical trainable set of its kind,
spelled with the document's own module names; a module without ``name`` is
called after its role (``speech_encoder``, ``projection``, ``llm``). Missing
sections fall back to ``default_architecture()``, the default cost model and
``builtin_strategies()``.
"""

from dataclasses import dataclass, field
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from asrscale.flops.cost_model import CostModelConfig

from .architecture import (
    DEFAULT_NAMES, AdapterSpec, ArchitectureGraph, ModuleRole, ModuleSpec, default_architecture
)
from .errors import ConfigurationError
from .keywords import Keywords as K
from .stages import Convergence, DatasetSpec, StageKind, StageSpec, TrainableModule
from .strategies import StrategySpec, builtin_strategies, for_architecture, trainable_for


@dataclass(frozen=True)
class ConfigDocument:
    architecture: ArchitectureGraph = field(default_factory=default_architecture)
    cost_model: CostModelConfig = field(default_factory=CostModelConfig)
    strategies: List[StrategySpec] = field(default_factory=builtin_strategies)

    def strategy(self, strategy_id: str) -> StrategySpec:
        for s in self.strategies:
            if s.id == strategy_id:
                return s

        raise ConfigurationError(f"Strategy '{strategy_id}' not in document; have {[s.id for s in self.strategies]}")


def _require(obj: Dict[str, Any], key: K, where: str) -> Any:
    if not isinstance(obj, dict) or key.value not in obj:
        raise ConfigurationError(f"{where}: missing key '{key.value}'")

    return obj[key.value]


def _enum(enum_type, value: Any, where: str):
    try:
        return enum_type(value)
    except ValueError:
        allowed = [e.value for e in enum_type]
        raise ConfigurationError(f"{where}: '{value}' is not one of {allowed}") from None


def _parse_adapter(obj: Dict[str, Any], where: str) -> AdapterSpec:
    dims = _require(obj, K.TargetDims, where)
    try:
        target_dims = tuple((int(d[0]), int(d[1])) for d in dims)
    except (TypeError, IndexError, ValueError):
        raise ConfigurationError(f"{where}: target_dims must be a list of [d_in, d_out] pairs") from None

    return AdapterSpec(rank=int(_require(obj, K.Rank, where)),
                       alpha=float(_require(obj, K.Alpha, where)),
                       targets_per_layer=int(obj.get(K.TargetsPerLayer.value, len(target_dims))),
                       layer_count=int(_require(obj, K.LayerCount, where)),
                       target_dims=target_dims)


def _parse_module(obj: Dict[str, Any], index: int) -> ModuleSpec:
    where: str = f"modules[{index}]"
    role: ModuleRole = _enum(ModuleRole, _require(obj, K.Role, where), where)
    adapter: Optional[AdapterSpec] = None
    if obj.get(K.Adapter.value) is not None:
        adapter = _parse_adapter(obj[K.Adapter.value], f"{where}.adapter")

    return ModuleSpec(name=str(obj.get(K.Name.value, DEFAULT_NAMES[role])),
                      role=role,
                      param_count=int(_require(obj, K.ParamCount, where)),
                      adapter=adapter)


def _parse_dataset(obj: Optional[Dict[str, Any]]) -> DatasetSpec:
    if obj is None:
        return DatasetSpec()

    kwargs: Dict[str, Any] = {}
    for key in (K.Hours, K.FrameRate, K.TextTokensPerSecond, K.Epochs):
        if key.value in obj:
            kwargs[key.value] = float(obj[key.value])
    if K.Downsample.value in obj:
        kwargs[K.Downsample.value] = int(obj[K.Downsample.value])

    return DatasetSpec(**kwargs)


def _parse_stage(obj: Dict[str, Any], where: str, arch: ArchitectureGraph) -> StageSpec:
    kind: StageKind = _enum(StageKind, _require(obj, K.Kind, where), where)
    convergence: Convergence = _enum(Convergence, obj.get(K.Convergence.value, Convergence.Full.value), where)

    trainable = trainable_for(kind, arch)
    if obj.get(K.Trainable.value) is not None:
        trainable = frozenset(TrainableModule(str(_require(t, K.Module, where)),
                                              bool(t.get(K.Base.value, False)),
                                              bool(t.get(K.Adapter.value, False)))
                              for t in obj[K.Trainable.value])

    return StageSpec(kind, trainable, convergence, _parse_dataset(obj.get(K.Dataset.value)))


def parse_document(data: Dict[str, Any]) -> ConfigDocument:
    """
    Build a ConfigDocument from decoded JSON

    :param data: the decoded document
    :returns: the ConfigDocument
    """

    if not isinstance(data, dict):
        raise ConfigurationError("Configuration document must be a JSON object")

    architecture = default_architecture()
    if K.Modules.value in data:
        architecture = ArchitectureGraph(tuple(_parse_module(m, i) for i, m in enumerate(data[K.Modules.value])))

    cost_model = CostModelConfig()
    if K.CostModel.value in data:
        c = data[K.CostModel.value]
        cost_model = CostModelConfig(float(c.get(K.CFwd.value, cost_model.c_fwd)),
                                     float(c.get(K.CActBwd.value, cost_model.c_act_bwd)),
                                     float(c.get(K.CWgrad.value, cost_model.c_wgrad)))

    strategies = [for_architecture(s, architecture) for s in builtin_strategies()]
    if K.Strategies.value in data:
        strategies = []
        for i, s in enumerate(data[K.Strategies.value]):
            where: str = f"strategies[{i}]"
            stages = tuple(_parse_stage(st, f"{where}.stages[{j}]", architecture)
                           for j, st in enumerate(_require(s, K.Stages, where)))
            strategies.append(StrategySpec(str(_require(s, K.Id, where)), stages))

        ids = [s.id for s in strategies]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Duplicate strategy ids in {ids}")

    return ConfigDocument(architecture, cost_model, strategies)


def load_document(path: Union[str, Path]) -> ConfigDocument:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None

    return parse_document(data)


def document_to_dict(doc: ConfigDocument) -> Dict[str, Any]:
    """
    Convert a ConfigDocument back to its JSON form; trainable sets are
    always written out explicitly

    :param doc: the document
    :returns: a JSON-serializable dict
    """

    modules: List[Dict[str, Any]] = []
    for m in doc.architecture.modules:
        entry: Dict[str, Any] = {K.Name.value: m.name, K.Role.value: m.role.value, K.ParamCount.value: m.param_count}
        if m.adapter is not None:
            entry[K.Adapter.value] = {
                K.Rank.value: m.adapter.rank,
                K.Alpha.value: m.adapter.alpha,
                K.TargetsPerLayer.value: m.adapter.targets_per_layer,
                K.LayerCount.value: m.adapter.layer_count,
                K.TargetDims.value: [list(d) for d in m.adapter.target_dims],
            }
        modules.append(entry)

    strategies: List[Dict[str, Any]] = []
    for s in doc.strategies:
        stages = []
        for st in s.stages:
            d = st.dataset
            stages.append({
                K.Kind.value: st.kind.value,
                K.Convergence.value: st.convergence.value,
                K.Trainable.value: [{K.Module.value: t.module, K.Base.value: t.base, K.Adapter.value: t.adapter}
                                    for t in sorted(st.trainable)],
                K.Dataset.value: {K.Hours.value: d.hours, K.FrameRate.value: d.frame_rate,
                                  K.Downsample.value: d.downsample,
                                  K.TextTokensPerSecond.value: d.text_tokens_per_second,
                                  K.Epochs.value: d.epochs},
            })
        strategies.append({K.Id.value: s.id, K.Stages.value: stages})

    return {
        K.Modules.value: modules,
        K.CostModel.value: {K.CFwd.value: doc.cost_model.c_fwd,
                            K.CActBwd.value: doc.cost_model.c_act_bwd,
                            K.CWgrad.value: doc.cost_model.c_wgrad},
        K.Strategies.value: strategies,
    }


def dump_document(doc: ConfigDocument) -> str:
    return json.dumps(document_to_dict(doc), indent=2)
