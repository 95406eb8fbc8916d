"""
Append-only run store: one JSON object per line. Writers hold an exclusive
flock on the log for the whole read-check-append; readers hold a shared one
and only ever see whole lines.
"""

from contextlib import contextmanager
import fcntl
import json
import logging
import os
from pathlib import Path
from typing import Iterator, List, Optional, Union

import asrscale.config_manager as cm
from asrscale.core.errors import ConfigurationError, StoreConflictError, StoreCorruptError, StoreError

from .records import RunRecord

logger = logging.getLogger(__name__)


class RunStore:
    def __init__(self, path: Optional[Union[str, Path]] = None):
        """
        :param path: the log file; defaults to the configured store path
        """

        if path is None:
            path = cm.get_store_path()
        if path is None:
            raise StoreError("No store path given; pass --store or set ASRSCALE_STORE")

        self.path = Path(path)

    @contextmanager
    def _locked(self, mode: str, lock: int) -> Iterator:
        if "r" in mode and not self.path.exists():
            yield None
            return

        with open(self.path, mode) as f:
            fcntl.flock(f.fileno(), lock)
            try:
                yield f
            finally:
                fcntl.flock(f.fileno(), fcntl.LOCK_UN)

    @staticmethod
    def _decode(data: bytes) -> List[RunRecord]:
        records: List[RunRecord] = []
        offset: int = 0
        for raw in data.splitlines(keepends=True):
            if not raw.endswith(b"\n"):
                # a torn final append; the records before it are intact
                logger.warning(f"Ignoring incomplete trailing line at byte offset {offset}")
                break
            if raw.strip():
                try:
                    records.append(RunRecord.from_dict(json.loads(raw)))
                except (ValueError, ConfigurationError) as e:
                    raise StoreCorruptError(f"cannot decode run record: {e}", offset) from None
            offset += len(raw)

        return records

    def load(self) -> List[RunRecord]:
        with self._locked("rb", fcntl.LOCK_SH) as f:
            if f is None:
                return []
            records = self._decode(f.read())

        logger.info(f"Loaded {len(records)} run(s) from {self.path}")
        return records

    def put(self, record: RunRecord) -> None:
        """
        Append a record

        :param record: must have a run_id not yet in the store
        """

        self.put_many([record])

    def put_many(self, records: List[RunRecord]) -> None:
        """
        Append records as one locked write; nothing is written when any
        run_id conflicts
        """

        ids = [r.run_id for r in records]
        if len(set(ids)) != len(ids):
            raise StoreConflictError(f"Duplicate run ids in batch: {sorted(i for i in set(ids) if ids.count(i) > 1)}")

        with self._locked("a+b", fcntl.LOCK_EX) as f:
            f.seek(0)
            data: bytes = f.read()
            # appending after a torn line would glue the new record onto it
            if data and not data.endswith(b"\n"):
                data = data[:data.rfind(b"\n") + 1]
                f.truncate(len(data))
            existing = {r.run_id for r in self._decode(data)}
            clashes = [i for i in ids if i in existing]
            if clashes:
                raise StoreConflictError(f"Run id(s) already in store {self.path}: {clashes}")

            f.seek(0, os.SEEK_END)
            for r in records:
                f.write((json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8"))
            f.flush()
            os.fsync(f.fileno())

        logger.info(f"Appended {len(records)} run(s) to {self.path}")

    def get(self, run_id: str) -> Optional[RunRecord]:
        for r in self.load():
            if r.run_id == run_id:
                return r

        return None

    def list(self, strategy_id: Optional[str] = None, encoder_tag: Optional[str] = None,
             source: Optional[str] = None) -> List[RunRecord]:
        return [r for r in self.load()
                if (strategy_id is None or r.strategy_id == strategy_id)
                and (encoder_tag is None or r.encoder_tag == encoder_tag)
                and (source is None or r.source == source)]
