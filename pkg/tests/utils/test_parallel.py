"""
Tests for order-preserving task execution.

These tests verify that:
- Results come back in task order for one or several workers.
- A worker count below one is rejected.
"""

from __future__ import annotations

import pytest

from delta_identity.utils.parallel import run_tasks

TASKS = [-5, 3, -1, 8, 0, -13, 21, -2]


@pytest.mark.parametrize("workers", [1, 2])
def test_results_in_task_order(workers):
    # builtins pickle under every start method
    assert run_tasks(abs, TASKS, workers) == [5, 3, 1, 8, 0, 13, 21, 2]


def test_empty_task_list():
    assert run_tasks(abs, [], 3) == []


def test_rejects_zero_workers():
    with pytest.raises(ValueError, match="workers"):
        run_tasks(abs, [1, 2], 0)
