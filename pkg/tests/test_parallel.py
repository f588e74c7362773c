"""
Contains tests for parallel.py.
"""
import functools
import os
import pickle
from typing import Callable, List

import pytest

from nlsignal.detectors import lightband_delta
from nlsignal.exceptions import ConfigurationError, QuadratureNonConvergence, SweepFailure
from nlsignal.field import SpectralDensity
from nlsignal.parallel import TASK_PRIORITY_LOW, TaskManager, delayed
from nlsignal.signaling import breakdown


def get_process_id():
    return os.getpid()


def recursive_function(x: int):
    if x <= 0:
        return 0
    return 1 + recursive_function(x - 1)


def failing(message: str):
    raise ConfigurationError(message, "bob")


class TestDelayed:
    def test_defers_call(self):
        calls = []
        task = delayed(calls.append)(1)
        assert calls == []
        task()
        assert calls == [1]

    def test_keeps_name(self):
        assert delayed(breakdown)(None, None).__name__ == "breakdown"


class TestInProcess:
    @pytest.mark.parametrize(
        "task,expected",
        [
            (delayed(sum)([1, 2]), [3]),
            (delayed(lambda x: sum(x))([2, 2]), [4]),
            (delayed(functools.partial(lambda x, y: sum([x, y]), 2))(3), [5]),
            (delayed(recursive_function)(8), [8]),
        ],
    )
    def test_returns_correct_result(self, task: Callable, expected: List):
        manager = TaskManager(workers=1)
        manager.add_task(task)
        assert manager.run() == expected

    def test_runs_in_calling_process(self):
        manager = TaskManager(workers=1)
        manager.add_tasks(delayed(get_process_id)() for _ in range(3))
        assert manager.run() == [os.getpid()] * 3

    def test_order_is_submission_order(self):
        manager = TaskManager(workers=1)
        manager.add_task(delayed(lambda: "low")(), priority=TASK_PRIORITY_LOW)
        manager.add_tasks(delayed(lambda x: x)(x) for x in range(5))
        assert manager.run() == ["low", 0, 1, 2, 3, 4]

    def test_failures_are_aggregated(self):
        manager = TaskManager(workers=1)
        manager.add_task(delayed(failing)("first"))
        manager.add_task(delayed(sum)([1]))
        manager.add_task(delayed(failing)("second"))
        with pytest.raises(SweepFailure) as failure:
            manager.run()
        assert len(failure.value.exceptions) == 2
        assert "bob: first" in str(failure.value)

    def test_queue_is_cleared(self):
        manager = TaskManager(workers=1)
        manager.add_task(delayed(sum)([1]))
        assert len(manager) == 1
        manager.run()
        assert len(manager) == 0
        assert manager.run() == []

    def test_breakdowns(self):
        pair = lightband_delta(1.0, 7.0, 2.0, 8.0)
        manager = TaskManager(workers=1)
        manager.add_tasks(delayed(breakdown)(pair, SpectralDensity(ell)) for ell in (0.01, 0.02))
        results = manager.run()
        assert results[1] == breakdown(pair, SpectralDensity(0.02))


class TestValidation:
    def test_rejects_non_callable(self):
        with pytest.raises(TypeError):
            TaskManager().add_task(3)

    def test_rejects_negative_priority(self):
        with pytest.raises(ValueError):
            TaskManager().add_task(delayed(sum)([1]), priority=-1)

    def test_rejects_zero_workers(self):
        with pytest.raises(ValueError):
            TaskManager(workers=0)


@pytest.mark.slow
class TestPool:
    def test_uses_worker_processes(self):
        manager = TaskManager(workers=2, max_tasks_per_worker=1)
        manager.add_tasks(delayed(get_process_id)() for _ in range(4))
        assert os.getpid() not in manager.run()

    def test_order(self):
        manager = TaskManager(workers=2)

        def identity(x):
            return x

        manager.add_tasks(delayed(identity)(x) for x in range(10))
        assert manager.run() == list(range(10))

    def test_failures_cross_process_boundary(self):
        manager = TaskManager(workers=2)
        manager.add_tasks(delayed(failing)(str(x)) for x in range(3))
        with pytest.raises(SweepFailure) as failure:
            manager.run()
        assert all(isinstance(e, ConfigurationError) for e in failure.value.exceptions)


@pytest.mark.parametrize(
    "exception",
    [
        ConfigurationError("must be positive", "separation"),
        QuadratureNonConvergence(1.5, 1e-3, 1000, "evaluation budget exhausted"),
        SweepFailure([ValueError("bad point")]),
    ],
    ids=lambda e: type(e).__name__,
)
def test_exceptions_survive_pickling(exception):
    """Task failures are pickled back from worker processes."""
    restored = pickle.loads(pickle.dumps(exception))
    assert type(restored) is type(exception)
    assert str(restored) == str(exception)
