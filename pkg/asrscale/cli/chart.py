from dataclasses import dataclass
import io
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import matplotlib
from matplotlib.figure import Figure
import numpy as np

import asrscale.config_manager as cm
from asrscale.core.curves import CheckpointCurve
from asrscale.core.errors import ConfigurationError
from asrscale.fitting.power_law import PowerLawFit, SamplePoint

AXES = ("linear", "loglog")

# fixed salt and no date so identical charts produce identical bytes
_SVG_RC = {
    "svg.hashsalt": "asrscale",
    "svg.fonttype": "none",
    "path.simplify": False,
}


class ChartInputError(ValueError):
    """
    A chart was requested with nothing to draw
    """


@dataclass(frozen=True)
class ChartSeries:
    label: str
    points: Tuple[SamplePoint, ...]


@dataclass(frozen=True)
class ChartFit:
    label: str
    fit: PowerLawFit


@dataclass(frozen=True)
class ChartSpec:
    series: Tuple[ChartSeries, ...]
    fits: Tuple[ChartFit, ...] = ()
    axes: str = "linear"
    title: str = ""
    output: Optional[str] = None
    x_label: str = "Total training FLOPs (x10^15)"
    y_label: str = "Average CER (%)"

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "fits", tuple(self.fits))
        if not self.series or not any(s.points for s in self.series):
            raise ChartInputError("no series")
        if self.axes not in AXES:
            raise ConfigurationError(f"Unknown axes {self.axes}; expected one of {AXES}")


def _check_positive(values: Iterable[float], axes: str) -> None:
    if axes == "loglog" and any(not (math.isfinite(v) and v > 0) for v in values):
        raise ConfigurationError("log-log axes need every plotted value to be positive")


def fit_polyline(fit: PowerLawFit, low: float, high: float, axes: str = "linear",
                 samples: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    The budgets and predicted errors a fit is drawn through

    :param fit: the fit
    :param low: smallest budget in the data
    :param high: largest budget in the data
    :param axes: log spacing is used on loglog axes
    :param samples: number of budgets, defaults to CHART_SAMPLES
    :returns: (budgets, errors)
    """

    samples = samples or cm.get("CHART_SAMPLES")
    budgets = np.geomspace(low, high, samples) if axes == "loglog" else np.linspace(low, high, samples)
    return budgets, fit.curve(budgets)


def _svg(fig: Figure) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def _write(text: str, output: Optional[Union[str, Path]]) -> None:
    if output is not None:
        Path(output).write_text(text, encoding="utf-8")


def render_chart(spec: ChartSpec) -> str:
    """
    Render sample points and fitted curves to a standalone SVG document.
    Each series is an SVG group with id points-<i> holding one marker per
    point; each fit is a group fit-<i> holding one path.

    :param spec: the chart
    :returns: the SVG text, also written to spec.output when set
    """

    budgets = [p.budget for s in spec.series for p in s.points]
    errors = [p.error for s in spec.series for p in s.points]
    low, high = min(budgets), max(budgets)
    lines = [fit_polyline(f.fit, low, high, spec.axes) for f in spec.fits]
    _check_positive(budgets + errors + [v for _, y in lines for v in y], spec.axes)

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(6.4, 4.8))
        ax = fig.add_subplot()
        for i, s in enumerate(spec.series):
            ax.plot([p.budget for p in s.points], [p.error for p in s.points], linestyle="none",
                    marker="o", color=f"C{i % 10}", label=s.label, gid=f"points-{i}")
        for i, (f, (x, y)) in enumerate(zip(spec.fits, lines)):
            ax.plot(x, y, linestyle="-", color=f"C{i % 10}", label=f"{f.label} fit", gid=f"fit-{i}")

        if spec.axes == "loglog":
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, linestyle=":")
        ax.legend()
        text = _svg(fig)

    _write(text, spec.output)
    return text


def render_curve_chart(curve: CheckpointCurve, axes: str = "linear", title: str = "",
                       output: Optional[str] = None) -> str:
    """
    Render a checkpoint curve with one line per run of same-stage
    checkpoints, in groups stage-<i>

    :param curve: the checkpoint curve
    :param axes: linear or loglog
    :param title: the chart title
    :param output: written to when given
    :returns: the SVG text
    """

    if len(curve) == 0:
        raise ChartInputError("no series")
    if axes not in AXES:
        raise ConfigurationError(f"Unknown axes {axes}; expected one of {AXES}")
    _check_positive([v for p in curve.points for v in (p.cumulative_flops, p.avg_cer)], axes)

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(6.4, 4.8))
        ax = fig.add_subplot()
        seen = {}
        for i, (kind, points) in enumerate(curve.segments()):
            first: bool = kind not in seen
            color = seen.setdefault(kind, f"C{len(seen) % 10}")
            ax.plot([p.cumulative_flops for p in points], [p.avg_cer for p in points], marker="o",
                    color=color, label=kind.value if first else "_nolegend_", gid=f"stage-{i}")

        if axes == "loglog":
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel("Cumulative training FLOPs (x10^15)")
        ax.set_ylabel("Average CER (%)")
        if title:
            ax.set_title(title)
        ax.grid(True, linestyle=":")
        ax.legend()
        text = _svg(fig)

    _write(text, output)
    return text


def series_from_groups(groups: dict) -> Sequence[ChartSeries]:
    return [ChartSeries(label, tuple(points)) for label, points in groups.items()]
