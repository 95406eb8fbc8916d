import csv
from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import asrscale.config_manager as cm
from asrscale.core.curves import CheckpointCurve, CheckpointPoint
from asrscale.core.errors import ConfigurationError, ParseError
from asrscale.core.stages import Convergence, StageKind

logger = logging.getLogger(__name__)

CURVE_HEADER = ("cumulative_flops", "avg_cer", "stage_kind")


@dataclass(frozen=True)
class ConvergencePolicy:
    """
    A stage has converged at checkpoint i when the relative CER improvement
    over the trailing window ending at i falls below the level's threshold
    """

    window: int = field(default_factory=lambda: cm.get("CONVERGENCE_WINDOW"))
    preliminary_threshold: float = field(default_factory=lambda: cm.get("PRELIMINARY_THRESHOLD"))
    full_threshold: float = field(default_factory=lambda: cm.get("FULL_THRESHOLD"))

    def __post_init__(self):
        if self.window < 2:
            raise ConfigurationError(f"Convergence window must be at least 2, got {self.window}")
        if not 0 < self.full_threshold <= self.preliminary_threshold < 1:
            raise ConfigurationError("Thresholds must satisfy 0 < full <= preliminary < 1, got "
                                     f"full = {self.full_threshold}, preliminary = {self.preliminary_threshold}")

    def threshold(self, level: Convergence) -> float:
        return self.preliminary_threshold if level is Convergence.Preliminary else self.full_threshold


def first_below(cers: Sequence[float], window: int, threshold: float) -> Optional[int]:
    for i in range(window - 1, len(cers)):
        start: float = cers[i - window + 1]
        improvement: float = (start - cers[i]) / start if start > 0 else 0.0
        if improvement < threshold:
            return i

    return None


def detect_convergence(curve: CheckpointCurve, policy: Optional[ConvergencePolicy] = None,
                       level: Union[Convergence, str] = Convergence.Preliminary) -> Optional[int]:
    """
    Find the first checkpoint at which a curve counts as converged

    :param curve: the checkpoint curve, at least policy.window points
    :param policy: window and thresholds, defaults from config
    :param level: preliminary or full
    :returns: the checkpoint index, or None if the curve never converges
    """

    policy = policy or ConvergencePolicy()
    level = Convergence(level)
    if len(curve) < policy.window:
        raise ConfigurationError(f"Curve has {len(curve)} checkpoints, fewer than the window of {policy.window}")

    index = first_below(curve.cers, policy.window, policy.threshold(level))
    logger.debug(f"{level.value} convergence at checkpoint {index}")
    return index


def read_curve_csv(path: Union[str, Path]) -> CheckpointCurve:
    """
    Read a checkpoint curve from CSV with header
    cumulative_flops,avg_cer,stage_kind

    :param path: the CSV file
    :returns: the CheckpointCurve
    """

    points: List[CheckpointPoint] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(c.strip() for c in header) != CURVE_HEADER:
            raise ParseError(f"expected header {','.join(CURVE_HEADER)}", 1)

        for row in reader:
            line: int = reader.line_num
            if not row:
                continue
            if len(row) != len(CURVE_HEADER):
                raise ParseError(f"expected {len(CURVE_HEADER)} columns, got {len(row)}", line)
            try:
                flops, cer = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"cannot parse number in {row[:2]}", line) from None
            try:
                kind = StageKind(row[2].strip())
            except ValueError:
                raise ParseError(f"unknown stage kind {row[2]!r}", line) from None
            if points and not flops > points[-1].cumulative_flops:
                raise ParseError(f"cumulative_flops must increase, got {flops} after {points[-1].cumulative_flops}", line)
            points.append(CheckpointPoint(flops, cer, kind))

    return CheckpointCurve(tuple(points))
