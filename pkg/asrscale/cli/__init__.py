from .chart import ChartFit, ChartInputError, ChartSeries, ChartSpec, fit_polyline, render_chart, render_curve_chart
from .main import build_parser, main, run_command
