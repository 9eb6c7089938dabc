"""
Test the command-line entry point end to end.
"""
import os

import pytest
from mock import patch

from activecd import main
from activecd.checks import CheckResult
from activecd.define import (AGGREGATE_FILE, EXIT_SPEC_ERROR,
                             EXIT_NUMERICAL_FAILURE)
from activecd.specfile import load_spec

from activecd.test.test_workflow import MockedCommandLineArgs
from activecd.test.utils import fixture_path


def run_main(argv):
    with pytest.raises(SystemExit) as excinfo:
        main.main(argv)
    return excinfo.value.code


def test_validate_toy_preset():
    assert run_main(['validate', '--preset', 'toy']) == 0


def test_invalid_spec_exits_with_spec_error():
    spec_file = fixture_path('specs/unknown_key.json')
    assert run_main(['solve', '--spec', spec_file]) == EXIT_SPEC_ERROR


def test_invalid_override_exits_with_spec_error():
    assert run_main(['solve', '--preset', 'toy',
                     '--set', 'stop.window=0']) == EXIT_SPEC_ERROR


def test_solve_and_figures(tmpdir):
    out_dir = str(tmpdir.join('results'))
    code = run_main(['solve', '--spec', fixture_path('specs/toy.json'),
                     '--out', out_dir])
    assert code == 0
    assert os.path.isfile(os.path.join(out_dir, AGGREGATE_FILE))

    assert run_main(['figures', '--inputs', out_dir]) == 0
    assert os.path.isfile(os.path.join(out_dir, 'fig_convergence.csv'))


def test_build_spec_applies_command_line_overrides():
    args = MockedCommandLineArgs(spec=fixture_path('specs/small.json'),
                                 seed=9, num_seeds=4, out='runs/x y',
                                 emit=['aggregate_csv'], adc_bits=2,
                                 adc_step=0.25, adc_formula='paper',
                                 overrides=['stop.max_iters=7'])
    spec = main.build_spec(args)
    assert spec.scenario.master_seed == 9
    assert spec.scenario.num_devices == 6
    assert spec.num_seeds == 4
    assert spec.output_dir == 'runs/x y'
    assert spec.emit == ('aggregate_csv',)
    assert spec.adc.bits == 2
    assert spec.adc.step == 0.25
    assert spec.adc.formula_mode == 'paper_literal'
    assert spec.stop.max_iters == 7


def test_build_spec_without_overrides_is_the_spec_file():
    args = MockedCommandLineArgs(spec=fixture_path('specs/small.json'))
    assert main.build_spec(args) == load_spec(fixture_path('specs/small.json'))


def test_build_spec_adc_sweep():
    args = MockedCommandLineArgs(preset='toy', adc_sweep=[1, 2])
    spec = main.build_spec(args)
    assert spec.adc_sweep_bits == (1, 2)
    assert [q and q.bits for q in spec.quantizers()] == [None, 1, 2]


def test_failed_check_exits_with_numerical_failure():
    failing = [CheckResult('reward-identity', False, 'worst step error 1')]
    with patch('activecd.main.run_checks', return_value=failing):
        code = run_main(['validate', '--preset', 'toy'])
    assert code == EXIT_NUMERICAL_FAILURE
