from .records import FIXTURE_PREFIX, INGESTED, RunRecord
from .csv_io import HEADER, parse_runs_csv, write_runs_csv
from .fixtures import TABLES, load_fixtures
from .run_store import RunStore
