"""
Test the consecutive and thread-pool cell runners.
"""
import time

import pytest

from activecd.parallel import ConsecutiveRunner, ParallelRunner, get_runner
from activecd.specfile import SpecError


class SleepingCellSolver(object):
    """
    Solves integer cells after sleeping for a per-cell delay, and raises
    the exception given for a cell instead of solving it.
    """
    def __init__(self, delays, exceptions=None):
        self._delays = delays
        self._exceptions = exceptions or {}
        self.solved = []

    def solve(self, cell):
        time.sleep(self._delays.get(cell, 0.0))
        if cell in self._exceptions:
            raise self._exceptions[cell]
        self.solved.append(cell)
        return 'result %d' % cell


def submit_all(runner, cells, callback=None):
    delivered = []

    def record(cell, outcome):
        delivered.append((cell, outcome))
        if callback is not None:
            callback(cell, outcome)

    for cell in cells:
        runner.run(record, cell)
    return delivered


@pytest.mark.parametrize(
    'make_runner', [
        ConsecutiveRunner,
        lambda cell_solver: ParallelRunner(cell_solver, processes=4),
    ]
)
def test_outcomes_follow_submission_order(make_runner):
    # earlier cells sleep longer, so a pool finishes them last
    cell_solver = SleepingCellSolver({0: 0.2, 1: 0.1, 2: 0.05, 3: 0.0})
    runner = make_runner(cell_solver)
    delivered = submit_all(runner, [0, 1, 2, 3])

    outcomes = runner.join()
    assert outcomes == [(0, 'result 0'), (1, 'result 1'),
                        (2, 'result 2'), (3, 'result 3')]
    assert sorted(delivered) == outcomes


@pytest.mark.parametrize(
    'runner_class', [ConsecutiveRunner, ParallelRunner]
)
def test_solver_exceptions_become_outcomes(runner_class):
    error = ValueError('Test exception')
    runner = runner_class(SleepingCellSolver({}, {1: error}))
    submit_all(runner, [0, 1, 2])

    outcomes = runner.join()
    assert [cell for cell, _ in outcomes] == [0, 1, 2]
    assert outcomes[1][1] is error
    assert outcomes[2][1] == 'result 2'


@pytest.mark.parametrize(
    'runner_class', [ConsecutiveRunner, ParallelRunner]
)
def test_callback_errors_surface_in_join(runner_class):
    def callback(cell, outcome):
        if cell == 0:
            raise KeyError('bookkeeping')

    cell_solver = SleepingCellSolver({})
    runner = runner_class(cell_solver)
    delivered = submit_all(runner, [0, 1, 2], callback)

    with pytest.raises(KeyError):
        runner.join()
    assert sorted(cell_solver.solved) == [0, 1, 2]
    assert len(delivered) == 3


def test_spec_errors_escape_the_pool():
    runner = ParallelRunner(SleepingCellSolver({}, {0: SpecError('bad')}),
                            processes=2)
    submit_all(runner, [0, 1])
    with pytest.raises(SpecError):
        runner.join()


def test_spec_errors_escape_consecutive_runs():
    runner = ConsecutiveRunner(SleepingCellSolver({}, {0: SpecError('bad')}))
    with pytest.raises(SpecError):
        submit_all(runner, [0])


def test_get_runner():
    cell_solver = SleepingCellSolver({})
    assert isinstance(get_runner(cell_solver), ConsecutiveRunner)
    assert isinstance(get_runner(cell_solver, 1), ConsecutiveRunner)
    runner = get_runner(cell_solver, 3)
    assert isinstance(runner, ParallelRunner)
    assert runner.join() == []
