"""Replica execution over a process pool.

Each task receives its own ``SeedSpec``; results come back in task order no
matter how the pool schedules them, so output does not depend on the worker
count.
"""

from concurrent.futures import ProcessPoolExecutor
import logging
from typing import Callable, Iterable, Optional, TypeVar

from entropy_lpp.config import current_config
from entropy_lpp.errors import InvalidParameterError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# stream_index = replica + role * ROLE_STRIDE keeps the samples of one
# experiment on disjoint streams
ROLE_STRIDE = 2**32


def stream_for(replica: int, role: int = 0) -> int:
    """
    >>> stream_for(3, 1) - stream_for(3, 0) == 2**32
    True
    """
    return replica + role * ROLE_STRIDE


class ReplicaRunner:
    """Map a picklable worker over replica tasks.

    With ``threads == 1`` everything runs in process, which keeps tracebacks
    simple and avoids pool start-up for small runs.
    """

    def __init__(self, threads: Optional[int] = None, chunksize: int = 16):
        threads = current_config.ELPP_THREADS if threads is None else threads
        if threads < 1:
            raise InvalidParameterError(
                f"thread count must be at least 1, got {threads}"
            )
        self.threads = int(threads)
        self.chunksize = chunksize

    def map(self, worker: Callable[[T], R], tasks: Iterable[T]) -> list[R]:
        tasks = list(tasks)
        if self.threads == 1 or len(tasks) < 2:
            return [worker(task) for task in tasks]
        logger.debug(
            "running %d replicas on %d workers", len(tasks), self.threads
        )
        with ProcessPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(worker, tasks, chunksize=self.chunksize))
