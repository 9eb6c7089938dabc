import os

import numpy as np
import pytest
from mock import patch

from activecd import specfile
from activecd.commandline import parse_args
from activecd.covariance import NumericalError
from activecd.define import AGGREGATE_FILE, TIMING_FILE, RESOLVED_SPEC_FILE
from activecd.formatting import (get_trace_filename, get_summary_filename,
                                 get_probe_filename, get_scenario_filename)
from activecd.parallel import ConsecutiveRunner, ParallelRunner
from activecd.rng import RandomStreams
from activecd.utils import slurp_json
from activecd.workflow import (CellSolver, ExperimentRunner, _iter_cells,
                               cell_config)

from activecd.test.utils import fixture_path


class MockedCommandLineArgs(object):
    """
    This mock uses default arguments from parse_args and allows to overwrite
    them in constructor.
    """
    def __init__(self, **kwargs):
        args = parse_args(['solve'])
        self.__dict__.update(args.__dict__)
        self.__dict__.update(kwargs)

    def __repr__(self):
        return self.__dict__.__repr__()


class MockedFailingCellSolver(CellSolver):
    """
    This mock raises the exception passed to its constructor for the cells
    of one replicate and solves every other cell normally.
    """
    def __init__(self, spec, out_dir, failing_seed, exception_to_throw):
        super(MockedFailingCellSolver, self).__init__(spec, out_dir)
        self._failing_seed = failing_seed
        self._exception_to_throw = exception_to_throw

    def solve(self, cell):
        if cell.seed == self._failing_seed:
            raise self._exception_to_throw
        return super(MockedFailingCellSolver, self).solve(cell)


def tiny_spec(**kwargs):
    data = {
        'scenario': {'num_devices': 4, 'bits_per_message': 1, 'seq_len': 4,
                     'num_antennas': 4, 'num_active': 1, 'master_seed': 5},
        'policies': [{'name': 'random'}, {'name': 'bernoulli'},
                     {'name': 'thompson'}],
        'stop': {'max_iters': 20, 'window': 4},
        'num_seeds': 20,
        'reference': False,
    }
    data.update(kwargs)
    return specfile.spec_from_dict(data)


def run_experiment(spec, out_dir, runner_class=ConsecutiveRunner, **kwargs):
    cell_solver = CellSolver(spec, out_dir)
    runner = runner_class(cell_solver, **kwargs)
    experiment = ExperimentRunner(runner, spec, out_dir)
    succeeded = experiment.run_cells()
    return experiment, succeeded


def read_lines(path):
    with open(path) as file_object:
        return file_object.read().splitlines()


def read_bytes(path):
    with open(path, 'rb') as file_object:
        return file_object.read()


def test_iter_cells_covers_every_combination():
    spec = tiny_spec(num_seeds=3, adc_sweep_bits=[1, 3])
    cells = list(_iter_cells(spec))
    assert len(cells) == 3 * 3 * 3
    assert len(set(cells)) == len(cells)
    assert [c.seed for c in cells[:9]] == [0] * 9
    assert sorted(set(c.adc_bits for c in cells)) == [0, 1, 3]


def test_cell_digest_depends_on_configuration():
    spec = tiny_spec()
    cells = list(_iter_cells(spec))
    configs = [cell_config(spec, c) for c in cells[:3]]
    assert configs[0] != configs[1]
    other = tiny_spec(stop={'max_iters': 21, 'window': 4})
    assert cell_config(spec, cells[0]) != cell_config(other, cells[0])


def test_toy_run_writes_single_trace(tmpdir):
    out_dir = str(tmpdir)
    spec = specfile.load_spec(fixture_path('specs/toy.json'))
    experiment, succeeded = run_experiment(spec, out_dir)

    assert succeeded
    assert len(experiment.results) == 1
    lines = read_lines(get_trace_filename(out_dir, 'random', 0, 0))
    assert lines[0] == '# activecd-trace 1.0'
    assert len(lines) == 3
    assert lines[2].startswith('1,')

    summary = slurp_json(get_summary_filename(out_dir, 'random', 0, 0))
    assert summary['iterations'] == 1
    assert summary['reference_F'] is None
    assert summary['detection']['declared'] == []

    aggregate = read_lines(os.path.join(out_dir, AGGREGATE_FILE))
    assert aggregate[0] == '# activecd-aggregate 1.0'
    assert len(aggregate) == 3
    assert aggregate[2].split(',')[:4] == ['random', '0', '0', 'ok']
    assert os.path.isfile(os.path.join(out_dir, RESOLVED_SPEC_FILE))
    assert specfile.load_spec(os.path.join(out_dir, RESOLVED_SPEC_FILE)) \
        == spec


def test_every_cell_gets_an_aggregate_row(tmpdir):
    out_dir = str(tmpdir)
    experiment, succeeded = run_experiment(tiny_spec(), out_dir)

    assert succeeded
    lines = read_lines(os.path.join(out_dir, AGGREGATE_FILE))
    rows = [line.split(',') for line in lines[2:]]
    assert len(rows) == 60
    assert set(row[3] for row in rows) == {'ok'}
    assert set(row[0] for row in rows) == {'random', 'bernoulli', 'thompson'}
    assert len(read_lines(os.path.join(out_dir, TIMING_FILE))) == 61


def test_aggregate_is_reproducible(tmpdir):
    first = str(tmpdir.mkdir('first'))
    second = str(tmpdir.mkdir('second'))
    spec = tiny_spec(num_seeds=3)
    run_experiment(spec, first)
    run_experiment(spec, second)
    assert read_bytes(os.path.join(first, AGGREGATE_FILE)) == \
        read_bytes(os.path.join(second, AGGREGATE_FILE))


def test_parallel_run_matches_consecutive_run(tmpdir):
    consecutive = str(tmpdir.mkdir('consecutive'))
    parallel = str(tmpdir.mkdir('parallel'))
    spec = tiny_spec(num_seeds=4, reference=True)
    run_experiment(spec, consecutive)
    run_experiment(spec, parallel, ParallelRunner, processes=3)
    assert read_bytes(os.path.join(consecutive, AGGREGATE_FILE)) == \
        read_bytes(os.path.join(parallel, AGGREGATE_FILE))
    summary = slurp_json(get_summary_filename(parallel, 'bernoulli', 0, 2))
    assert isinstance(summary['reference_F'], float)


def test_reference_run_draws_from_its_own_stream(tmpdir):
    spec = tiny_spec(num_seeds=1, reference=True,
                     policies=[{'name': 'random'}])
    cell_solver = CellSolver(spec, str(tmpdir))
    cell = next(_iter_cells(spec))
    problem = cell_solver.prepare(cell)

    with patch('activecd.workflow.reference_objective',
               return_value=-1.5) as reference_objective:
        assert cell_solver.reference(cell, problem) == -1.5
        # cached per (seed, ADC bits)
        assert cell_solver.reference(cell, problem) == -1.5
    assert reference_objective.call_count == 1

    rng = reference_objective.call_args[0][3]
    streams = RandomStreams(spec.scenario.master_seed, cell.seed)
    expected = streams.stream('reference').integers(1 << 30, size=8)
    policy_draws = streams.stream('policy').integers(1 << 30, size=8)
    drawn = rng.integers(1 << 30, size=8)
    np.testing.assert_array_equal(drawn, expected)
    assert not np.array_equal(drawn, policy_draws)


@pytest.mark.parametrize(
    'exception_to_throw,runner_class', [
        (NumericalError('Test exception'), ConsecutiveRunner),
        (NumericalError('Test exception'), ParallelRunner),
        (ValueError('Test exception'), ConsecutiveRunner),
        (ValueError('Test exception'), ParallelRunner),
    ]
)
def test_failed_cells_are_collected(tmpdir, exception_to_throw,
                                    runner_class):
    out_dir = str(tmpdir)
    spec = tiny_spec(num_seeds=3)
    cell_solver = MockedFailingCellSolver(spec, out_dir, 1,
                                          exception_to_throw)
    experiment = ExperimentRunner(runner_class(cell_solver), spec, out_dir)

    assert not experiment.run_cells()
    assert len(experiment.failures) == 3
    assert len(experiment.results) == 6
    assert set(cell.seed for cell, _ in experiment.failures) == {1}

    rows = [line.split(',')
            for line in read_lines(os.path.join(out_dir, AGGREGATE_FILE))[2:]]
    assert len(rows) == 9
    failed = [row for row in rows if row[3] != 'ok']
    assert len(failed) == 3
    expected = 'failed:%s' % type(exception_to_throw).__name__
    assert all(row[3] == expected for row in failed)
    assert all(row[2] == '1' for row in failed)
    assert all(row[4] == '' for row in failed)


def test_probes_and_scenarios_are_written(tmpdir):
    out_dir = str(tmpdir)
    spec = tiny_spec(num_seeds=1, probe_period=5,
                     emit=['traces', 'summaries', 'aggregate_csv', 'probes',
                           'scenario'])
    run_experiment(spec, out_dir)

    lines = read_lines(get_probe_filename(out_dir, 'thompson', 0, 0))
    assert lines[0] == '# activecd-probe 1.0'
    assert lines[1] == 't,elapsed_s,p_md'
    assert lines[2].startswith('0,')
    assert lines[2].endswith(',1.0')

    scenario = slurp_json(get_scenario_filename(out_dir, 0, 0))
    assert len(scenario['truth']['active_set']) == 1
    assert scenario['config']['num_devices'] == 4
    assert len(os.listdir(os.path.dirname(
        get_scenario_filename(out_dir, 0, 0)))) == 1


def test_adc_sweep_solves_every_resolution(tmpdir):
    out_dir = str(tmpdir)
    spec = tiny_spec(num_seeds=2, policies=[{'name': 'random'}],
                     adc_sweep_bits=[1, 4])
    experiment, succeeded = run_experiment(spec, out_dir)
    assert succeeded
    rows = [line.split(',')
            for line in read_lines(os.path.join(out_dir, AGGREGATE_FILE))[2:]]
    assert sorted(set(row[1] for row in rows)) == ['0', '1', '4']
    assert os.path.isfile(get_trace_filename(out_dir, 'random', 4, 1))


def test_mocked_args_use_parser_defaults():
    args = MockedCommandLineArgs(jobs=4)
    assert args.command == 'solve'
    assert args.jobs == 4
    assert args.preset == 'desk'
