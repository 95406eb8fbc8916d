import argparse
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import replace
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import asrscale.config_manager as cm
from asrscale.analysis import (
    ConvergencePolicy, compare_strategies, compare_test_sets, detect_convergence,
    outcomes_from_runs, pareto_frontier, read_curve_csv, samples_from_runs,
    stage_cost_decomposition
)
from asrscale.core import (
    ConfigDocument, Convergence, DegenerateFitError, FitError, ParseError, StoreError,
    builtin_strategies, load_document, validate_strategy
)
from asrscale.fitting import (
    PowerLawFit, fit_power_law, fit_saturating_power_law, predict_error, required_budget
)
from asrscale.flops import strategy_flops
from asrscale.metrics import read_transcripts, round_half_up, score_transcripts
from asrscale.store import RunStore, load_fixtures, parse_runs_csv, write_runs_csv
from asrscale.util import Timer

from .chart import ChartFit, ChartInputError, ChartSpec, render_chart, render_curve_chart, series_from_groups
from .inputs import load_inputs
from .reports import FORMATS, render, wide_rows

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

METHOD_ALIASES = {"loglog": "loglog-ols", "nonlinear": "nonlinear-ls",
                  "loglog-ols": "loglog-ols", "nonlinear-ls": "nonlinear-ls"}


class UsageError(Exception):
    pass


def _format_arg(p: argparse.ArgumentParser, choices: Sequence[str] = FORMATS) -> None:
    p.add_argument("--format", choices=choices, default="table", help="output format")


def _input_arg(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", action="append", required=required, default=None,
                   help="CSV file, fixture:tableN[:strategy] or store; repeatable")
    p.add_argument("--store", default=None, help="run store path for --input store")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asrscale",
                                     description="Training-cost and scaling analysis for multi-stage LLM-based ASR")
    parser.add_argument("--log-level", default=None, help="logging level, defaults to ASRSCALE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("fixtures", help="print a bundled result table")
    p.add_argument("table", help="1-4")
    _format_arg(p)

    p = sub.add_parser("ingest", help="append runs from CSV to the store")
    p.add_argument("csv")
    p.add_argument("--store", default=None, help="run store path, defaults to ASRSCALE_STORE")

    p = sub.add_parser("cer", help="score hypotheses against references")
    p.add_argument("--ref", required=True, help="reference TSV (id<TAB>text)")
    p.add_argument("--hyp", required=True, help="hypothesis TSV (id<TAB>text)")
    p.add_argument("--strip-punctuation", action="store_true")
    p.add_argument("--lenient", action="store_true", help="skip unmatched ids instead of failing")
    _format_arg(p)

    p = sub.add_parser("fit", help="fit CER = beta * FLOPs ** alpha per group")
    _input_arg(p)
    p.add_argument("--method", choices=sorted(METHOD_ALIASES), default=None)
    p.add_argument("--saturating", action="store_true", help="also fit an irreducible loss")
    p.add_argument("--by", choices=("strategy", "encoder"), default="strategy")
    p.add_argument("--out", default=None, help="write the fit document (JSON) here")
    _format_arg(p)

    p = sub.add_parser("predict", help="evaluate a power law at a budget")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--linf", type=float, default=0.0)
    p.add_argument("--budget", type=float, required=True, help="x10^15 FLOPs")
    _format_arg(p)

    p = sub.add_parser("plan", help="budget needed to reach a target CER")
    p.add_argument("--target-cer", type=float, required=True)
    p.add_argument("--fit", required=True, help="fit document written by fit --out")
    p.add_argument("--label", default=None, help="which fit of a multi-fit document")
    _format_arg(p)

    p = sub.add_parser("compare", help="CERR and FLOPs ratio against a baseline")
    p.add_argument("--baseline", required=True)
    p.add_argument("--candidate", default=None, help="compare per test set against this strategy")
    _input_arg(p)
    _format_arg(p)

    p = sub.add_parser("pareto", help="non-dominated outcomes on (FLOPs, CER)")
    _input_arg(p)
    _format_arg(p)

    p = sub.add_parser("decompose", help="fixed and per-data FLOPs of each strategy")
    _input_arg(p)
    _format_arg(p)

    p = sub.add_parser("chart", help="render an SVG scaling chart")
    _input_arg(p, required=False)
    p.add_argument("--out", required=True)
    p.add_argument("--axes", choices=("linear", "loglog"), default="linear")
    p.add_argument("--title", default="")
    p.add_argument("--fit", action="store_true", help="draw a log-log OLS fit per series")
    p.add_argument("--by", choices=("strategy", "encoder"), default="strategy")
    p.add_argument("--curve", default=None, help="render a checkpoint curve CSV instead")

    p = sub.add_parser("estimate", help="training FLOPs of strategies under the cost model")
    p.add_argument("--config", default=None, help="JSON configuration document")
    p.add_argument("--strategy", default=None)
    p.add_argument("--hours", type=float, default=None, help="override the dataset hours of every stage")
    _format_arg(p)

    p = sub.add_parser("strategies", help="list the built-in strategies")
    _format_arg(p)

    p = sub.add_parser("converge", help="first converged checkpoint of a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--level", choices=[c.value for c in Convergence], default=Convergence.Preliminary.value)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--preliminary-threshold", type=float, default=None)
    p.add_argument("--full-threshold", type=float, default=None)

    return parser


def _fits(groups, method: Optional[str], saturating: bool) -> Dict[str, PowerLawFit]:
    fits: Dict[str, PowerLawFit] = {}
    for label, points in groups.items():
        with Timer(f"fit {label}", logger):
            fits[label] = fit_saturating_power_law(points) if saturating else fit_power_law(points, method)
        if fits[label].degenerate:
            raise DegenerateFitError(f"{label}: all {len(points)} errors are equal; no power law to fit")

    return fits


def _fit_document(fits: Dict[str, PowerLawFit]) -> str:
    if len(fits) == 1:
        return next(iter(fits.values())).to_json() + "\n"

    return json.dumps({label: json.loads(f.to_json()) for label, f in fits.items()}, indent=2) + "\n"


def cmd_fixtures(args) -> str:
    records = load_fixtures(args.table)
    if args.format == "csv":
        return write_runs_csv(records)

    return render(wide_rows(records), args.format,
                  {"TEST-MEETING": "cer", "TEST-NET": "cer", "avg_cer": "cer", "total_flops": "flops"})


def cmd_ingest(args) -> str:
    with open(args.csv, newline="", encoding="utf-8") as f:
        records = parse_runs_csv(f)
    store = RunStore(args.store)
    store.put_many(records)

    return f"ingested {len(records)} run(s) into {store.path}\n"


def cmd_cer(args) -> str:
    report = score_transcripts(read_transcripts(args.ref), read_transcripts(args.hyp),
                               keep_punctuation=not args.strip_punctuation, strict=not args.lenient)
    row = {"cer": report.cer * 100.0, "edits": report.edits, "reference_chars": report.reference_chars,
           "utterances": report.utterances}

    return render([row], args.format, {"cer": "cer"})


def cmd_fit(args) -> str:
    method = METHOD_ALIASES[args.method] if args.method else None
    groups = samples_from_runs(load_inputs(args.input, args.store), args.by)
    if not groups:
        raise UsageError("no runs to fit")

    fits = _fits(groups, method, args.saturating)
    if args.out:
        Path(args.out).write_text(_fit_document(fits), encoding="utf-8")

    if args.format == "json":
        return _fit_document(fits)

    rows = [{"label": label, "method": f.method.value, "alpha": f.alpha, "beta": f.beta,
             "l_infinity": f.l_infinity, "r2_log": f.r2_log, "r2_linear": f.r2_linear, "n_points": f.n_points}
            for label, f in fits.items()]
    return render(rows, args.format)


def cmd_predict(args) -> str:
    fit = PowerLawFit(alpha=args.alpha, beta=args.beta, l_infinity=args.linf)
    value = predict_error(fit, args.budget)
    if args.format == "table":
        return f"{round_half_up(value):.{cm.get('CER_DECIMALS')}f}\n"

    return render([{"budget": args.budget, "predicted_cer": value}], args.format)


def _load_fit(path: str, label: Optional[str]) -> PowerLawFit:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"fit document {path}: {e.msg}", e.lineno) from None

    if isinstance(document, dict) and "alpha" in document:
        return PowerLawFit.from_dict(document)
    if not isinstance(document, dict) or not document:
        raise ParseError(f"fit document {path} holds no fits")
    if label is None:
        if len(document) != 1:
            raise UsageError(f"fit document holds {sorted(document)}; choose one with --label")
        label = next(iter(document))
    if label not in document:
        raise UsageError(f"no fit labelled {label} in {path}")

    return PowerLawFit.from_dict(document[label])


def cmd_plan(args) -> str:
    fit = _load_fit(args.fit, args.label)
    budget = required_budget(fit, args.target_cer)
    if args.format == "table":
        return f"{budget:.2f}\n"

    return render([{"target_cer": args.target_cer, "required_budget": budget}], args.format)


def cmd_compare(args) -> str:
    records = load_inputs(args.input, args.store)
    if args.candidate:
        rows = [vars(c) for c in compare_test_sets(records, args.baseline, args.candidate)]
        return render(rows, args.format, {"baseline_cer": "cer", "candidate_cer": "cer", "cerr": "percent"})

    rows = [vars(r) for r in compare_strategies(outcomes_from_runs(records), args.baseline)]
    return render(rows, args.format, {"avg_cer": "cer", "total_flops": "flops",
                                      "cerr": "percent", "flops_ratio": "percent"})


def cmd_pareto(args) -> str:
    frontier = pareto_frontier(outcomes_from_runs(load_inputs(args.input, args.store)))
    return render([vars(o) for o in frontier], args.format, {"avg_cer": "cer", "total_flops": "flops"})


def cmd_decompose(args) -> str:
    outcomes = outcomes_from_runs(load_inputs(args.input, args.store))
    by_strategy: Dict[str, List] = {}
    for o in outcomes:
        by_strategy.setdefault(o.strategy_id, []).append(o)

    rows = [vars(stage_cost_decomposition(runs)) for runs in by_strategy.values()]
    return render(rows, args.format, {"slope": "flops", "intercept": "flops", "residual_max_relative": "percent"})


def cmd_chart(args) -> str:
    if args.curve:
        render_curve_chart(read_curve_csv(args.curve), args.axes, args.title, args.out)
        return f"wrote {args.out}\n"

    if not args.input:
        raise UsageError("chart needs --input or --curve")

    groups = samples_from_runs(load_inputs(args.input, args.store, allow_empty=True), args.by)
    fits = []
    if args.fit:
        fits = [ChartFit(label, fit_power_law(points, "loglog-ols")) for label, points in groups.items()
                if len({p.budget for p in points}) >= 2]
    render_chart(ChartSpec(tuple(series_from_groups(groups)), tuple(fits), args.axes, args.title, args.out))

    return f"wrote {args.out}\n"


def cmd_estimate(args) -> str:
    document = load_document(args.config) if args.config else ConfigDocument()
    strategies = [document.strategy(args.strategy)] if args.strategy else document.strategies
    if args.hours is not None:
        strategies = [replace(s, stages=tuple(replace(st, dataset=st.dataset.with_hours(args.hours))
                                              for st in s.stages))
                      for s in strategies]

    rows: List[Dict[str, Any]] = []
    for s in strategies:
        result = strategy_flops(s, document.architecture, document.cost_model)
        for i, (stage, breakdown) in enumerate(zip(s.stages, result.stages)):
            rows.append({"strategy_id": s.id, "stage": i, "kind": stage.kind.value,
                         "convergence": stage.convergence.value,
                         "forward": breakdown.phase_total("forward"),
                         "activation_backward": breakdown.phase_total("activation_backward"),
                         "weight_gradient": breakdown.phase_total("weight_gradient"),
                         "total": breakdown.total})
        rows.append({"strategy_id": s.id, "stage": "all", "kind": "", "convergence": "",
                     "forward": float("nan"), "activation_backward": float("nan"),
                     "weight_gradient": float("nan"), "total": result.total})

    return render(rows, args.format, {k: "flops" for k in ("forward", "activation_backward", "weight_gradient", "total")})


def cmd_strategies(args) -> str:
    rows = []
    for s in builtin_strategies():
        result = validate_strategy(s)
        rows.append({"strategy_id": s.id,
                     "stages": " -> ".join(f"{st.kind.value}({st.convergence.value})" for st in s.stages),
                     "valid": result.ok})

    return render(rows, args.format)


def cmd_converge(args) -> str:
    defaults = ConvergencePolicy()
    policy = ConvergencePolicy(args.window if args.window is not None else defaults.window,
                               args.preliminary_threshold if args.preliminary_threshold is not None
                               else defaults.preliminary_threshold,
                               args.full_threshold if args.full_threshold is not None else defaults.full_threshold)
    index = detect_convergence(read_curve_csv(args.curve), policy, args.level)

    return "not converged\n" if index is None else f"{index}\n"


COMMANDS = {
    "fixtures": cmd_fixtures,
    "ingest": cmd_ingest,
    "cer": cmd_cer,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "plan": cmd_plan,
    "compare": cmd_compare,
    "pareto": cmd_pareto,
    "decompose": cmd_decompose,
    "chart": cmd_chart,
    "estimate": cmd_estimate,
    "strategies": cmd_strategies,
    "converge": cmd_converge,
}


def _dispatch(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as e:
        # argparse has already printed usage or help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        sys.stdout.write(COMMANDS[args.command](args))
    except (UsageError, ChartInputError, ParseError, OSError) as e:
        sys.stderr.write(f"asrscale {args.command}: error: {e}\n")
        return EXIT_USAGE
    except (ValueError, StoreError, FitError) as e:
        sys.stderr.write(f"asrscale {args.command}: {type(e).__name__}: {e}\n")
        return EXIT_DOMAIN

    return EXIT_OK


def run_command(argv: Sequence[str]) -> Tuple[int, str, str]:
    """
    Run one CLI invocation with captured output

    :param argv: the arguments, without the program name
    :returns: (exit code, stdout text, stderr text)
    """

    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = _dispatch(argv)

    return code, out.getvalue(), err.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> None:
    argv = sys.argv[1:] if argv is None else argv
    level = None
    if "--log-level" in argv:
        i = list(argv).index("--log-level")
        level = argv[i + 1] if i + 1 < len(argv) else None
    try:
        cm.configure_logging(level)
    except ValueError as e:
        sys.stderr.write(f"asrscale: error: {e}\n")
        sys.exit(EXIT_USAGE)

    sys.exit(_dispatch(argv))


if __name__ == "__main__":
    main()
