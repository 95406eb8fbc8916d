from importlib import resources
import io
from typing import List, Union

from asrscale.core.errors import ConfigurationError

from .csv_io import parse_runs_csv
from .records import FIXTURE_PREFIX, RunRecord

TABLES = (1, 2, 3, 4)


def load_fixtures(table: Union[int, str]) -> List[RunRecord]:
    """
    The bundled result tables as run records: table 1 (all strategies at
    10,000 hours), table 2 (full vs preliminary convergence), table 3 (all
    strategies at four data scales) and table 4 (two encoders at four scales)

    :param table: 1-4, or "table1".."table4"
    :returns: the records, marked with source fixture:tableN
    """

    key = str(table)
    if key.startswith("table"):
        key = key[len("table"):]
    if not key.isdigit() or int(key) not in TABLES:
        raise ConfigurationError(f"Unknown fixture table {table}; expected one of {TABLES}")

    name = f"table{int(key)}"
    text: str = resources.files("asrscale.store").joinpath("data", f"{name}.csv").read_text(encoding="utf-8")
    return parse_runs_csv(io.StringIO(text), source=f"{FIXTURE_PREFIX}{name}")
