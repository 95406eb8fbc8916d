from dataclasses import dataclass
import math
from typing import Any, Dict, Optional, Tuple

from asrscale.core.curves import CheckpointCurve
from asrscale.core.errors import ConfigurationError
from asrscale.metrics.cer import TestSetScore

INGESTED = "ingested"
FIXTURE_PREFIX = "fixture:"


@dataclass(frozen=True)
class RunRecord:
    """
    One training run: per-test-set CERs (percent) and total training FLOPs
    (units of 10^15) for a strategy at a data scale
    """

    run_id: str
    strategy_id: str
    encoder_tag: str
    data_hours: float
    scores: Tuple[TestSetScore, ...]
    total_flops: float
    curve: Optional[CheckpointCurve] = None
    source: str = INGESTED

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(self.scores))
        if not self.run_id:
            raise ConfigurationError("Run id must be non-empty")
        if len(self.scores) == 0:
            raise ConfigurationError(f"Run {self.run_id} has no scores")
        names = [s.set_name for s in self.scores]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"Run {self.run_id} scores a test set twice: {names}")
        if not (math.isfinite(self.total_flops) and self.total_flops > 0):
            raise ConfigurationError(f"Run {self.run_id}: total_flops must be positive, got {self.total_flops}")
        if not (math.isfinite(self.data_hours) and self.data_hours > 0):
            raise ConfigurationError(f"Run {self.run_id}: data_hours must be positive, got {self.data_hours}")
        if self.source != INGESTED and not self.source.startswith(FIXTURE_PREFIX):
            raise ConfigurationError(f"Run {self.run_id}: unknown source {self.source}")

    def score(self, set_name: str) -> float:
        for s in self.scores:
            if s.set_name == set_name:
                return s.cer

        raise KeyError(f"Run {self.run_id} has no score for test set {set_name}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "strategy_id": self.strategy_id,
            "encoder_tag": self.encoder_tag,
            "data_hours": self.data_hours,
            "scores": [{"set_name": s.set_name, "cer": s.cer} for s in self.scores],
            "total_flops": self.total_flops,
            "curve": None if self.curve is None else self.curve.to_list(),
            "source": self.source,
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "RunRecord":
        try:
            curve = d.get("curve")
            return RunRecord(
                run_id=str(d["run_id"]),
                strategy_id=str(d["strategy_id"]),
                encoder_tag=str(d["encoder_tag"]),
                data_hours=float(d["data_hours"]),
                scores=tuple(TestSetScore(str(s["set_name"]), float(s["cer"])) for s in d["scores"]),
                total_flops=float(d["total_flops"]),
                curve=None if curve is None else CheckpointCurve.from_list(curve),
                source=str(d.get("source", INGESTED)),
            )
        except (AttributeError, KeyError, TypeError) as e:
            raise ConfigurationError(f"Invalid run record: missing or malformed {e}") from None
