import logging
import time
from typing import Optional


class Timer:
    """
    Wall-clock timer; as a context manager it logs the elapsed time of
    the block at INFO
    """

    def __init__(self, label: str = "", logger: Optional[logging.Logger] = None):
        self.label: str = label
        self.logger: logging.Logger = logger or logging.getLogger(__name__)
        self.start_time: float = time.perf_counter()
        self.elapsed: Optional[float] = None

    def seconds(self) -> float:
        return time.perf_counter() - self.start_time

    def reset(self) -> None:
        self.start_time = time.perf_counter()

    def __enter__(self) -> "Timer":
        self.reset()
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = self.seconds()
        self.logger.info(f"{self.label or 'block'} took {self.elapsed:.6f} s")
