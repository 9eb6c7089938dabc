# -*- coding: utf-8 -*-

"""
Test the utility functions.
"""
import os

import pytest

from activecd import utils


def test_canonical_json_is_order_independent():
    first = utils.canonical_json({'b': 1, 'a': [1, 2]})
    second = utils.canonical_json({'a': [1, 2], 'b': 1})
    assert first == second == '{"a":[1,2],"b":1}'


def test_config_digest():
    digest = utils.config_digest({'policy': 'random', 'seed': 3})
    assert len(digest) == 16
    assert digest == utils.config_digest({'seed': 3, 'policy': 'random'})
    assert digest != utils.config_digest({'policy': 'random', 'seed': 4})
    assert len(utils.config_digest({}, length=8)) == 8


@pytest.mark.parametrize(
    "value,expected", [
        (None, ''),
        (1, '1.0'),
        (0.1, '0.1'),
        (-2.5e-17, '-2.5e-17'),
        (float('inf'), 'inf'),
    ]
)
def test_format_float(value, expected):
    assert utils.format_float(value) == expected


def test_mkdir_p(tmpdir):
    path = str(tmpdir.join('a', 'b', 'c'))
    utils.mkdir_p(path)
    assert os.path.isdir(path)
    utils.mkdir_p(path)
    assert os.path.isdir(path)


def test_write_atomically_replaces_contents(tmpdir):
    filename = str(tmpdir.join('out', 'table.csv'))
    utils.write_atomically(filename, 'a,b\n1,2\n')
    utils.write_atomically(filename, 'a,b\n3,4\n')
    with open(filename) as file_object:
        assert file_object.read() == 'a,b\n3,4\n'
    assert os.listdir(os.path.dirname(filename)) == ['table.csv']


def test_json_helpers(tmpdir):
    filename = str(tmpdir.join('summary.json'))
    utils.spit_json_atomically({'final_F': 1.5, 'iterations': 3}, filename)
    assert utils.slurp_json(filename) == {'final_F': 1.5, 'iterations': 3}


def test_is_debug_run(caplog):
    caplog.set_level('DEBUG')
    assert utils.is_debug_run()
    caplog.set_level('WARNING')
    assert not utils.is_debug_run()
