"""
Renders report rows as an aligned table, CSV or JSON. Tables round CERs
half-up to CER_DECIMALS and percentages to RATIO_DECIMALS; CSV and JSON
keep full float precision.
"""

import json
import math
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

import asrscale.config_manager as cm
from asrscale.metrics.cer import average_cer, round_half_up

FORMATS = ("table", "csv", "json")


def _display(value: Any, kind: Optional[str]) -> Any:
    if not isinstance(value, float) or kind is None:
        return value
    if math.isnan(value):
        return ""
    if kind == "cer":
        return f"{round_half_up(value):.{cm.get('CER_DECIMALS')}f}"
    if kind == "percent":
        decimals: int = cm.get("RATIO_DECIMALS")
        return f"{round_half_up(value * 100.0, decimals):.{decimals}f}%"
    if kind == "flops":
        return f"{value:.2f}"

    return f"{value:.6g}"


def render(rows: Sequence[Dict[str, Any]], fmt: str = "table", kinds: Optional[Dict[str, str]] = None) -> str:
    """
    :param rows: one dict per row, all with the same keys
    :param fmt: table, csv or json
    :param kinds: column -> "cer" | "percent" | "flops" | "number" for table rounding
    :returns: the rendered text, newline-terminated
    """

    if fmt not in FORMATS:
        raise ValueError(f"Unknown format {fmt}; expected one of {FORMATS}")

    if fmt == "json":
        clean = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()} for r in rows]
        return json.dumps(clean, indent=2) + "\n"

    frame = pd.DataFrame(list(rows))
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n")

    if frame.empty:
        return "(no rows)\n"
    kinds = kinds or {}
    for column in frame.columns:
        frame[column] = [_display(v, kinds.get(column, "number" if isinstance(v, float) else None))
                         for v in frame[column]]

    return frame.to_string(index=False) + "\n"


def wide_rows(records) -> List[Dict[str, Any]]:
    """
    One row per run with a CER column per test set and the average
    """

    rows: List[Dict[str, Any]] = []
    for r in records:
        row: Dict[str, Any] = {"run_id": r.run_id, "strategy_id": r.strategy_id, "encoder_tag": r.encoder_tag,
                               "data_hours": r.data_hours}
        for s in r.scores:
            row[s.set_name] = s.cer
        row["avg_cer"] = average_cer(r.scores)
        row["total_flops"] = r.total_flops
        rows.append(row)

    return rows
