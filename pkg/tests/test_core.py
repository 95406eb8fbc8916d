import json
import unittest

import pytest

from asrscale.core import (
    AdapterSpec, ArchitectureGraph, ConfigurationError, Convergence,
    DatasetSpec, ModuleRole, ModuleSpec, StageKind, StageSpec, StrategySpec,
    TrainableModule, builtin_strategies, canonical_trainable, default_architecture,
    dump_document, get_strategy, load_document, make_stage, parse_document,
    validate_strategy
)
from asrscale.flops import strategy_flops


def kinds(strategy_id: str):
    return [(s.kind, s.convergence) for s in get_strategy(strategy_id).stages]


class TestBuiltinStrategies(unittest.TestCase):
    def setUp(self):
        self.registry = builtin_strategies()

    def test_seven_unique_ids(self):
        ids = [s.id for s in self.registry]
        self.assertEqual(ids, ["S1", "S2", "S3", "S4", "S5", "S6", "S5-preliminary"])

    def test_all_validate(self):
        for s in self.registry:
            self.assertTrue(validate_strategy(s).ok, s.id)
            self.assertTrue(validate_strategy(s, default_architecture()).ok, s.id)

    def test_alignment_only(self):
        self.assertEqual(kinds("S1"), [(StageKind.Alignment, Convergence.Full)])

    def test_preliminary(self):
        self.assertEqual(kinds("S5-preliminary"), [(StageKind.EncoderFinetune, Convergence.Full),
                                                   (StageKind.Alignment, Convergence.Preliminary),
                                                   (StageKind.LLMAdaptation, Convergence.Full)])

    def test_s6(self):
        self.assertEqual([k for k, _ in kinds("S6")], [StageKind.EncoderFinetune, StageKind.Alignment,
                                                       StageKind.LLMAdaptation, StageKind.FullJoint])

    def test_unknown_id(self):
        with self.assertRaises(ConfigurationError):
            get_strategy("S7")


@pytest.mark.parametrize("stage_kinds, message, index", [
    ([StageKind.Alignment, StageKind.EncoderFinetune], "encoder-finetune must be first", 1),
    ([StageKind.EncoderFinetune, StageKind.EncoderFinetune], "at most one encoder-finetune stage", 1),
    ([StageKind.Alignment, StageKind.Alignment], "stage kind alignment appears at most once", 1),
    ([StageKind.LLMAdaptation, StageKind.Alignment], "stage kind alignment out of canonical order", 1),
])
def test_ordering_violations(stage_kinds, message, index):
    result = validate_strategy(StrategySpec("x", tuple(make_stage(k) for k in stage_kinds)))
    assert not result
    assert (message, index) in [(v.invariant, v.stage_index) for v in result.violations]


def test_empty_strategy():
    result = validate_strategy(StrategySpec("x", ()))
    assert [str(v) for v in result.violations] == ["stages non-empty"]


def test_trainable_mismatch_is_reported():
    stage = StageSpec(StageKind.Alignment, frozenset({TrainableModule("llm", False, True)}))
    result = validate_strategy(StrategySpec("x", (stage,)))
    assert str(result.violations[0]) == "stage 0: trainable set does not match stage kind alignment"


@pytest.mark.parametrize("kind, expected", [
    (StageKind.EncoderFinetune, {("speech_encoder", True, False)}),
    (StageKind.Alignment, {("projection", True, False)}),
    (StageKind.LLMAdaptation, {("projection", True, False), ("llm", False, True)}),
    (StageKind.FullJoint, {("speech_encoder", True, False), ("projection", True, False), ("llm", False, True)}),
])
def test_canonical_trainable(kind, expected):
    assert {(t.module, t.base, t.adapter) for t in canonical_trainable(kind)} == expected


class TestArchitecture(unittest.TestCase):
    def test_default_roles_in_order(self):
        arch = default_architecture()
        self.assertEqual([m.role for m in arch.modules],
                         [ModuleRole.SpeechEncoder, ModuleRole.Projection, ModuleRole.LanguageModel])
        self.assertEqual(arch.position("llm"), 2)
        self.assertEqual(arch.module("projection").param_count, 27_532_288)

    def test_wrong_order_rejected(self):
        with self.assertRaises(ConfigurationError):
            ArchitectureGraph((ModuleSpec("p", ModuleRole.Projection, 10),
                               ModuleSpec("e", ModuleRole.SpeechEncoder, 10),
                               ModuleSpec("l", ModuleRole.LanguageModel, 10)))

    def test_unknown_module(self):
        with self.assertRaises(ConfigurationError):
            default_architecture().module("decoder")

    def test_invalid_specs(self):
        with self.assertRaises(ConfigurationError):
            ModuleSpec("e", ModuleRole.SpeechEncoder, 0)
        with self.assertRaises(ConfigurationError):
            AdapterSpec(rank=0, alpha=16, targets_per_layer=1, layer_count=1, target_dims=((4, 4),))
        with self.assertRaises(ConfigurationError):
            AdapterSpec(rank=8, alpha=16, targets_per_layer=2, layer_count=1, target_dims=((4, 4),))
        with self.assertRaises(ConfigurationError):
            DatasetSpec(hours=1, frame_rate=0)
        with self.assertRaises(ConfigurationError):
            DatasetSpec(hours=1, downsample=0)


class TestDocument(unittest.TestCase):
    def setUp(self):
        self.data = {
            "modules": [
                {"name": "enc", "role": "speech-encoder", "param_count": 10},
                {"name": "proj", "role": "projection", "param_count": 5},
                {"name": "lm", "role": "language-model", "param_count": 100,
                 "adapter": {"rank": 2, "alpha": 4, "layer_count": 1, "target_dims": [[4, 4]]}},
            ],
            "cost_model": {"c_fwd": 2, "c_act_bwd": 4, "c_wgrad": 2},
            "strategies": [{"id": "A", "stages": [{"kind": "alignment", "dataset": {"hours": 1},
                                                   "trainable": [{"module": "proj", "base": True}]}]}],
        }

    def test_parse(self):
        doc = parse_document(self.data)
        self.assertEqual(doc.architecture.module("lm").adapter.targets_per_layer, 1)
        self.assertEqual(doc.cost_model.c_act_bwd, 4.0)
        stage = doc.strategy("A").stages[0]
        self.assertEqual(stage.dataset.hours, 1.0)
        self.assertEqual(stage.convergence, Convergence.Full)
        self.assertTrue(validate_strategy(doc.strategy("A"), doc.architecture).ok)

    def test_missing_sections_take_defaults(self):
        doc = parse_document({})
        self.assertEqual([s.id for s in doc.strategies], [s.id for s in builtin_strategies()])
        self.assertEqual(doc.architecture, default_architecture())

    def test_dump_then_load(self):
        doc = parse_document(self.data)
        again = parse_document(json.loads(dump_document(doc)))
        self.assertEqual(doc, again)

    def test_default_trainable_uses_document_names(self):
        del self.data["strategies"][0]["stages"][0]["trainable"]
        doc = parse_document(self.data)
        self.assertEqual(doc.strategy("A").stages[0].trainable, frozenset({TrainableModule("proj", True, False)}))
        self.assertGreater(strategy_flops(doc.strategy("A"), doc.architecture, doc.cost_model).total, 0)

    def test_builtin_strategies_follow_document_names(self):
        del self.data["strategies"]
        doc = parse_document(self.data)
        for s in doc.strategies:
            self.assertTrue(validate_strategy(s, doc.architecture).ok, s.id)
            self.assertGreater(strategy_flops(s, doc.architecture, doc.cost_model).total, 0)

    def test_nameless_modules(self):
        for m in self.data["modules"]:
            del m["name"]
        self.data["strategies"] = [{"id": "S2", "stages": [{"kind": "alignment"}, {"kind": "llm-adaptation"}]}]
        doc = parse_document(self.data)
        self.assertEqual([m.name for m in doc.architecture.modules], ["speech_encoder", "projection", "llm"])
        self.assertTrue(validate_strategy(doc.strategy("S2"), doc.architecture).ok)
        self.assertGreater(strategy_flops(doc.strategy("S2"), doc.architecture, doc.cost_model).total, 0)

    def test_bad_kind(self):
        self.data["strategies"][0]["stages"][0]["kind"] = "pretraining"
        with self.assertRaises(ConfigurationError):
            parse_document(self.data)


def test_load_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_document(path)
