"""
Resolves --input values: a CSV path, fixture:tableN[:strategy] or store
"""

from pathlib import Path
from typing import List, Optional, Sequence

from asrscale.core.errors import ParseError
from asrscale.store.csv_io import parse_runs_csv
from asrscale.store.fixtures import load_fixtures
from asrscale.store.records import FIXTURE_PREFIX, RunRecord
from asrscale.store.run_store import RunStore

STORE_INPUT = "store"


def load_input(value: str, store_path: Optional[str] = None, allow_empty: bool = False) -> List[RunRecord]:
    """
    :param value: the --input value
    :param store_path: the --store value, used for the store pseudo-path
    :param allow_empty: return no records for an empty CSV file instead of
                        failing on its missing header
    """

    if value.startswith(FIXTURE_PREFIX):
        parts = value.split(":", 2)
        records = load_fixtures(parts[1])
        if len(parts) == 3:
            records = [r for r in records if r.strategy_id == parts[2]]
        return records

    if value == STORE_INPUT:
        return RunStore(store_path).load()

    path = Path(value)
    if allow_empty and path.is_file() and not path.read_text(encoding="utf-8").strip():
        return []
    with open(path, newline="", encoding="utf-8") as f:
        return parse_runs_csv(f)


def load_inputs(values: Sequence[str], store_path: Optional[str] = None, allow_empty: bool = False) -> List[RunRecord]:
    records: List[RunRecord] = []
    for v in values:
        records.extend(load_input(v, store_path, allow_empty))

    ids = [r.run_id for r in records]
    if len(set(ids)) != len(ids):
        raise ParseError(f"the same run id appears twice across inputs {list(values)}")

    return records
