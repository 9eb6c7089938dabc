# -*- coding: utf-8 -*-

"""
Cell runners. A runner solves experiment cells, either one after another or
on a thread pool, and hands every outcome (a CellResult or the exception
the cell raised) to a completion callback.
"""

import abc
import functools
import logging
import threading
import traceback
from multiprocessing.dummy import Pool


class AbstractRunner(abc.ABC):
    """
    Base class for cell runners. Subclasses implement `_schedule`, which
    starts a task, and `_wait`, which blocks until every started task has
    finished.

    Outcomes are kept per submission slot, so `join` reports them in the
    order the cells were submitted whatever order they finished in.
    Completion callbacks never run concurrently with each other.
    """

    def __init__(self, cell_solver):
        self._cell_solver = cell_solver
        self._outcomes = []
        self._callback_errors = []
        self._deliver_lock = threading.Lock()

    def run(self, callback, cell):
        """
        Submit one cell.

        @param callback: Called as callback(cell, outcome) once the cell is
            done.
        @type callback: callable
        """
        slot = len(self._outcomes)
        self._outcomes.append((cell, None))
        self._schedule(functools.partial(self._run_wrapper, slot, callback,
                                         cell))

    def join(self):
        """
        Wait for every submitted cell.

        @return: (cell, outcome) pairs in submission order.
        @rtype: [(Cell, CellResult or Exception)]
        """
        self._wait()
        outcomes, self._outcomes = self._outcomes, []
        if self._callback_errors:
            errors, self._callback_errors = self._callback_errors, []
            raise errors[0]
        return outcomes

    @abc.abstractmethod
    def _schedule(self, task):
        raise NotImplementedError()

    @abc.abstractmethod
    def _wait(self):
        raise NotImplementedError()

    def _run_wrapper(self, slot, callback, cell):
        """
        Solve one cell, catching every exception of the cell solver, and
        deliver the outcome.
        """
        try:
            outcome = self._cell_solver.solve(cell)
        except Exception as e:
            logging.error('Cell %s failed: %s', cell, traceback.format_exc())
            outcome = e
        self._outcomes[slot] = (cell, outcome)

        with self._deliver_lock:
            try:
                callback(cell, outcome)
            except Exception as e:
                logging.error('Completion callback failed for cell %s: %s',
                              cell, traceback.format_exc())
                self._callback_errors.append(e)


class ConsecutiveRunner(AbstractRunner):
    """
    Solves each cell as soon as it is submitted, in the calling thread.
    """

    def _schedule(self, task):
        task()

    def _wait(self):
        pass


class ParallelRunner(AbstractRunner):
    """
    Solves cells on a thread pool. Every cell owns its solver state and
    random streams, and numpy releases the GIL inside the dense linear
    algebra.
    """

    def __init__(self, cell_solver, processes=1):
        super().__init__(cell_solver)
        self._pool = Pool(processes=processes)
        self._pending = []

    def _schedule(self, task):
        self._pending.append(self._pool.apply_async(_capture_escapes,
                                                    (task,)))

    def _wait(self):
        self._pool.close()
        self._pool.join()
        pending, self._pending = self._pending, []
        for async_result in pending:
            escaped = async_result.get()
            if escaped is not None:
                raise escaped


def _capture_escapes(task):
    """
    Run a pool task and return what escaped the runner's wrapper, e.g. a
    SpecError. Pool workers only catch Exception, so a BaseException
    would otherwise never complete its task.
    """
    try:
        task()
    except BaseException as e:
        return e
    return None


def get_runner(cell_solver, jobs=1):
    return (ParallelRunner(cell_solver, jobs) if jobs > 1
            else ConsecutiveRunner(cell_solver))
