"""
Bulk ingestion format: one row per (run, test set)

    run_id,strategy_id,encoder_tag,data_hours,test_set,cer,total_flops
    s5p-2000,S5-preliminary,whisper-medium-ft,2000,TEST-MEETING,10.77,476.70
    s5p-2000,S5-preliminary,whisper-medium-ft,2000,TEST-NET,7.86,476.70

Rows sharing a run_id are merged into one RunRecord.
"""

import csv
import io
import math
from typing import Dict, List, Optional, TextIO, Tuple

from asrscale.core.errors import ConfigurationError, ParseError
from asrscale.metrics.cer import TestSetScore

from .records import INGESTED, RunRecord

HEADER: Tuple[str, ...] = ("run_id", "strategy_id", "encoder_tag", "data_hours", "test_set", "cer", "total_flops")


def _number(text: str, column: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column}: cannot parse number {text!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column}: number must be finite, got {text!r}", line)

    return value


def parse_runs_csv(stream: TextIO, source: str = INGESTED) -> List[RunRecord]:
    """
    Parse run rows from CSV text

    :param stream: UTF-8 text with the documented header
    :param source: provenance recorded on every parsed record
    :returns: the records, in order of first appearance of each run_id
    """

    reader = csv.reader(stream)
    header: Optional[List[str]] = None
    header_line: int = 0
    for row in reader:
        if row:
            header = [c.strip() for c in row]
            header_line = reader.line_num
            break

    if header is None:
        raise ParseError("missing header", 1)
    if tuple(header) != HEADER:
        raise ParseError(f"expected header {','.join(HEADER)}, got {','.join(header)}", header_line)

    runs: Dict[str, Dict] = {}
    for row in reader:
        line: int = reader.line_num
        if not row:
            continue
        if len(row) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} columns, got {len(row)}", line)

        run_id, strategy_id, encoder_tag, hours_text, test_set, cer_text, flops_text = (c.strip() for c in row)
        if not run_id or not test_set:
            raise ParseError("run_id and test_set must be non-empty", line)

        data_hours = _number(hours_text, "data_hours", line)
        cer = _number(cer_text, "cer", line)
        total_flops = _number(flops_text, "total_flops", line)
        if cer < 0:
            raise ParseError(f"column cer: must be non-negative, got {cer_text!r}", line)

        run = runs.setdefault(run_id, {
            "fields": (strategy_id, encoder_tag, data_hours, total_flops),
            "scores": {},
            "line": line,
        })
        if run["fields"] != (strategy_id, encoder_tag, data_hours, total_flops):
            raise ParseError(f"run {run_id} disagrees with its row on line {run['line']}", line)
        if test_set in run["scores"]:
            raise ParseError(f"duplicate test set {test_set} for run {run_id}", line)
        run["scores"][test_set] = cer

    records: List[RunRecord] = []
    for run_id, run in runs.items():
        strategy_id, encoder_tag, data_hours, total_flops = run["fields"]
        try:
            records.append(RunRecord(run_id, strategy_id, encoder_tag, data_hours,
                                     tuple(TestSetScore(name, cer) for name, cer in run["scores"].items()),
                                     total_flops, source=source))
        except ConfigurationError as e:
            raise ParseError(str(e), run["line"]) from None

    return records


def write_runs_csv(records: List[RunRecord], stream: Optional[TextIO] = None) -> str:
    """
    Serialize records in the ingestion format; floats are written with repr
    so parsing the output reproduces them exactly

    :param records: the records
    :param stream: written to when given
    :returns: the CSV text
    """

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(HEADER)
    for r in records:
        for s in r.scores:
            writer.writerow((r.run_id, r.strategy_id, r.encoder_tag, repr(r.data_hours),
                             s.set_name, repr(s.cer), repr(r.total_flops)))

    text: str = buffer.getvalue()
    if stream is not None:
        stream.write(text)

    return text
