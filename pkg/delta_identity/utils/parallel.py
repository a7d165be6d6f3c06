"""
Order-preserving task execution.

Tasks are plain picklable arguments handed to a module-level function.
With one worker they run inline; otherwise a ``ProcessPoolExecutor`` maps
them and results come back in task order, so output never depends on
scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_tasks(func: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply ``func`` to every task, in order.

    :param func: Module-level function (must be picklable for ``workers > 1``).
    :param tasks: Task arguments.
    :param workers: Process count; ``1`` runs in the calling process.
    :raises ValueError: If ``workers < 1``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    logger.debug("Running %d tasks on %d worker(s)", len(tasks), workers)
    if workers == 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))
