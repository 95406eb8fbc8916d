from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from .errors import ConfigurationError
from .stages import StageKind


@dataclass(frozen=True)
class CheckpointPoint:
    cumulative_flops: float
    avg_cer: float
    stage_kind: StageKind


@dataclass(frozen=True)
class CheckpointCurve:
    """
    Average CER at successive training checkpoints, with cumulative FLOPs
    in units of 10^15
    """

    points: Tuple[CheckpointPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        for prev, cur in zip(self.points, self.points[1:]):
            if not cur.cumulative_flops > prev.cumulative_flops:
                raise ConfigurationError(f"Checkpoint FLOPs must be strictly increasing: {prev.cumulative_flops} then {cur.cumulative_flops}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def cers(self) -> List[float]:
        return [p.avg_cer for p in self.points]

    def segments(self) -> List[Tuple[StageKind, List[CheckpointPoint]]]:
        """
        Split the curve into runs of consecutive checkpoints of the same stage

        :returns: (stage kind, points) in curve order
        """

        segments: List[Tuple[StageKind, List[CheckpointPoint]]] = []
        for p in self.points:
            if segments and segments[-1][0] is p.stage_kind:
                segments[-1][1].append(p)
            else:
                segments.append((p.stage_kind, [p]))

        return segments

    def to_list(self) -> List[Dict[str, Any]]:
        return [{"cumulative_flops": p.cumulative_flops, "avg_cer": p.avg_cer, "stage_kind": p.stage_kind.value}
                for p in self.points]

    @staticmethod
    def from_list(items: Sequence[Dict[str, Any]]) -> "CheckpointCurve":
        try:
            return CheckpointCurve(tuple(CheckpointPoint(float(i["cumulative_flops"]), float(i["avg_cer"]),
                                                         StageKind(i["stage_kind"]))
                                         for i in items))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"Invalid checkpoint curve: {e}") from None
