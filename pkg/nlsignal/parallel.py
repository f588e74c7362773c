"""
Runs independent evaluations (sweep points, oracle integrals) in parallel.

Tasks are cloudpickled when queued, so closures and lambdas over detector pairs travel to worker
processes. Workers hand results back pickled as well, and :meth:`TaskManager.run` returns them
in the order the tasks were added, whatever order the pool finished them in.
"""
import functools
import logging
from dataclasses import dataclass, field
from multiprocessing.pool import Pool
from typing import Any, Callable, Iterable, List, NamedTuple, Optional

import cloudpickle

from nlsignal.exceptions import SweepFailure

logger = logging.getLogger(__name__)

TASK_PRIORITY_HIGH: int = 1
TASK_PRIORITY_MEDIUM: int = 2
TASK_PRIORITY_LOW: int = 3


def delayed(func: Callable) -> Callable[..., Callable[[], Any]]:
    """
    Binds arguments to ``func`` without calling it.

    ::

        delayed(breakdown)(pair, sd)()  # same as breakdown(pair, sd)
    """

    def bind(*args, **kwargs) -> Callable[[], Any]:
        return functools.wraps(func)(functools.partial(_call, func, args, kwargs))

    return bind


def _call(func: Callable, args: tuple, kwargs: dict):
    return func(*args, **kwargs)


@dataclass(frozen=True, order=True)
class _Task:
    """A queued callable; tasks order by priority, then by submission."""

    priority: int
    index: int
    payload: bytes = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        return f"task {self.index + 1}"


class _Outcome(NamedTuple):
    index: int
    payload: Optional[bytes]
    error: Optional[BaseException]


def _execute(task: _Task) -> _Outcome:
    try:
        result = cloudpickle.loads(task.payload)()
        return _Outcome(task.index, cloudpickle.dumps(result), None)
    except Exception as error:  # pylint: disable=broad-except
        logger.debug("%s failed: %s", task.name, error)
        return _Outcome(task.index, None, error)


class TaskManager:
    """
    Queue of tasks run in worker processes, or in the calling process when ``workers=1``.

    ::

        manager = TaskManager(workers=4)
        manager.add_tasks(delayed(breakdown)(pair, sd.with_ell(ell)) for ell in grid)
        results = manager.run()
    """

    def __init__(self, workers: Optional[int] = None, max_tasks_per_worker: Optional[int] = None):
        """
        :param workers: number of worker processes; ``None`` uses one per CPU.
        :param max_tasks_per_worker: tasks a worker runs before it is replaced.
        """
        if workers is not None and workers < 1:
            raise ValueError(f"workers must be positive, got {workers}")
        self._workers = workers
        self._max_tasks_per_worker = max_tasks_per_worker
        self._queue: List[_Task] = []

    def __len__(self) -> int:
        return len(self._queue)

    def add_task(self, task: Callable[[], Any], priority: int = TASK_PRIORITY_HIGH) -> None:
        """Queues a zero-argument callable; lower ``priority`` values are dispatched first."""
        if not callable(task):
            raise TypeError(f"task must be callable, got {type(task).__name__}")
        if priority < 0:
            raise ValueError(f"priority must be non-negative, got {priority}")
        self._queue.append(_Task(priority, len(self._queue), cloudpickle.dumps(task)))

    def add_tasks(self, tasks: Iterable[Callable[[], Any]], priority: int = TASK_PRIORITY_HIGH):
        for task in tasks:
            self.add_task(task, priority)

    def run(self) -> list:
        """
        Runs and empties the queue.

        :returns: task results in submission order.
        :raise SweepFailure: if any task raised; carries every exception.
        """
        queue, self._queue = sorted(self._queue), []
        if not queue:
            return []
        logger.debug("running %d tasks on %s workers", len(queue), self._workers or "all")
        if self._workers == 1:
            outcomes = [_execute(task) for task in queue]
        else:
            with Pool(self._workers, maxtasksperchild=self._max_tasks_per_worker) as pool:
                outcomes = pool.map(_execute, queue)

        errors = [outcome.error for outcome in sorted(outcomes) if outcome.error is not None]
        if errors:
            raise SweepFailure(errors)
        return [cloudpickle.loads(outcome.payload) for outcome in sorted(outcomes)]
