"""
Test command line module.
"""
from argparse import ArgumentTypeError

import pytest

from activecd import __version__, commandline
from activecd.test import test_workflow


def test_command_arg_required():
    mock_args = test_workflow.MockedCommandLineArgs(version=False)
    assert commandline.command_arg_required(mock_args)


def test_command_arg_not_required_for_version():
    mock_args = test_workflow.MockedCommandLineArgs(version=True)
    assert not commandline.command_arg_required(mock_args)


def test_defaults():
    args = commandline.parse_args(['solve'])
    assert args.command == 'solve'
    assert args.preset == 'desk'
    assert args.spec is None
    assert args.jobs == 1
    assert args.overrides == []
    assert args.emit is None
    assert args.adc_sweep is None
    assert not args.svg


def test_version_exits(capsys):
    with pytest.raises(SystemExit) as excinfo:
        commandline.parse_args(['--version'])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == __version__


def test_missing_command_exits():
    with pytest.raises(SystemExit) as excinfo:
        commandline.parse_args([])
    assert excinfo.value.code == 1


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        commandline.parse_args(['download'])


def test_jobs_must_be_positive():
    with pytest.raises(SystemExit) as excinfo:
        commandline.parse_args(['solve', '--jobs', '0'])
    assert excinfo.value.code == 1


def test_repeated_overrides_are_collected():
    args = commandline.parse_args(['solve', '--set', 'stop.max_iters=5',
                                   '--set', 'num_seeds=2'])
    assert args.overrides == ['stop.max_iters=5', 'num_seeds=2']


def test_emit_is_split():
    args = commandline.parse_args(['solve', '--emit',
                                   'traces, probes,aggregate_csv'])
    assert args.emit == ['traces', 'probes', 'aggregate_csv']


def test_adc_options():
    args = commandline.parse_args(['solve', '--adc-sweep', '1,2,3,4',
                                   '--adc-formula', 'paper',
                                   '--adc-step', '0.25'])
    assert args.adc_sweep == [1, 2, 3, 4]
    assert args.adc_formula == 'paper'
    assert args.adc_step == 0.25


def test_figures_options():
    args = commandline.parse_args(['figures', '--inputs', 'a', 'b', '--svg'])
    assert args.inputs == ['a', 'b']
    assert args.svg


@pytest.mark.parametrize(
    "value,expected", [
        ('3', [3]),
        ('1,2,3,4', [1, 2, 3, 4]),
        ('1, 2,', [1, 2]),
    ]
)
def test_parse_bit_list(value, expected):
    assert commandline.parse_bit_list(value) == expected


@pytest.mark.parametrize("value", ['', '0,1', 'one', '-2'])
def test_parse_bit_list_rejects_bad_values(value):
    with pytest.raises(ArgumentTypeError):
        commandline.parse_bit_list(value)


def test_environment_variables_are_read(monkeypatch):
    monkeypatch.setenv('ACTIVECD_JOBS', '3')
    args = commandline.parse_args(['solve'])
    assert args.jobs == 3
