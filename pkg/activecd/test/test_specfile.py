# -*- coding: utf-8 -*-

"""
Test experiment spec parsing and serialization.
"""
import json

import pytest

from activecd import specfile
from activecd.adc import QuantizerConfig
from activecd.define import PRESETS, FORMULA_LITERAL
from activecd.specfile import SpecError, ExperimentSpec

from activecd.test.utils import fixture_path, slurp_fixture


def test_load_toy_spec():
    spec = specfile.load_spec(fixture_path('specs/toy.json'))
    assert spec.preset == 'toy'
    assert spec.scenario.num_devices == 1
    assert spec.scenario.seq_len == 1
    assert spec.scenario.master_seed == 11
    assert spec.stop.max_iters == 1
    assert [p.name for p in spec.policies] == ['random']
    assert spec.reference is False


def test_preset_values_can_be_overridden():
    spec = specfile.spec_from_dict({'preset': 'desk', 'num_seeds': 3,
                                    'scenario': {'num_active': 5}})
    assert spec.scenario.num_devices == 100
    assert spec.scenario.num_active == 5
    assert spec.num_seeds == 3
    assert [p.name for p in spec.policies] == ['random', 'bernoulli',
                                               'thompson']


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_round_trip_is_identity(name):
    spec = specfile.preset_spec(name)
    assert specfile.spec_from_dict(specfile.spec_to_dict(spec)) == spec
    text = specfile.dumps_spec(spec)
    assert specfile.parse_spec_text(text) == spec


def test_crowded_preset_is_desk_with_more_devices_and_noise():
    desk = specfile.preset_spec('desk')
    crowded = specfile.preset_spec('crowded')
    assert crowded.scenario.num_active == 2 * desk.scenario.num_active
    assert crowded.scenario.noise_power_dbm == pytest.approx(
        desk.scenario.noise_power_dbm + 4.0)
    assert crowded.scenario.seq_len == desk.scenario.seq_len
    assert crowded.stop == desk.stop
    assert crowded.policies == desk.policies
    assert crowded.num_seeds == desk.num_seeds == 20


def test_round_trip_with_adc_and_labels():
    spec = specfile.spec_from_dict({
        'preset': 'toy',
        'policies': [{'name': 'bernoulli', 'label': 'eps-0.3',
                      'epsilon': 0.3},
                     {'name': 'bernoulli', 'label': 'eps-0.9',
                      'epsilon': 0.9}],
        'adc': {'bits': 3, 'formula_mode': 'literal'},
        'adc_sweep_bits': [1, 2],
        'scenario': {'distances_km': [0.5]},
    })
    assert spec.adc.formula_mode == FORMULA_LITERAL
    assert spec.scenario.distances_km == (0.5,)
    assert specfile.parse_spec_text(specfile.dumps_spec(spec)) == spec


@pytest.mark.parametrize(
    "formula_mode,expected", [
        ('paper_literal', 'paper_literal'),
        ('paper', 'paper_literal'),
        ('standard_bussgang', 'standard_bussgang'),
        ('standard', 'standard_bussgang'),
    ]
)
def test_formula_modes_are_accepted(formula_mode, expected):
    spec = specfile.spec_from_dict({
        'preset': 'toy',
        'adc': {'bits': 3, 'formula_mode': formula_mode},
    })
    assert spec.adc.formula_mode == expected


def test_unknown_key_is_reported_with_line():
    with pytest.raises(SpecError) as excinfo:
        specfile.load_spec(fixture_path('specs/unknown_key.json'))
    assert excinfo.value.lineno == 5
    assert 'num_antenas' in str(excinfo.value)


def test_invalid_json_is_reported_with_line():
    with pytest.raises(SpecError) as excinfo:
        specfile.load_spec(fixture_path('specs/broken.json'))
    assert excinfo.value.lineno == 3


def test_invalid_value_is_reported_with_line():
    with pytest.raises(SpecError) as excinfo:
        specfile.load_spec(fixture_path('specs/too_many_active.json'))
    assert excinfo.value.lineno in (4, 5)
    assert 'exceeds' in str(excinfo.value)


def test_invalid_policy_is_reported():
    text = json.dumps({'policies': [{'name': 'cyclic'}]}, indent=4)
    with pytest.raises(SpecError) as excinfo:
        specfile.parse_spec_text(text)
    assert 'cyclic' in str(excinfo.value)
    assert excinfo.value.lineno == 2


def test_missing_file():
    with pytest.raises(SpecError):
        specfile.load_spec(fixture_path('specs/does-not-exist.json'))


@pytest.mark.parametrize(
    "data", [
        {'preset': 'huge'},
        {'schema_version': '2.0'},
        {'num_seeds': 0},
        {'emit': ['movies']},
        {'policies': {'name': 'random'}},
        {'policies': [{'name': 'random'}, {'name': 'random'}]},
        {'stop': {'window': 0}},
        {'adc': {'bits': 2, 'per_antenna_bits': [2, 1]}},
        {'adc_sweep_bits': [0]},
        [],
    ]
)
def test_invalid_specs(data):
    with pytest.raises(SpecError):
        specfile.spec_from_dict(data)


def test_spec_error_message_names_location():
    error = SpecError('bad value', 7, 'exp.json')
    assert str(error) == 'exp.json:7: bad value'
    assert str(SpecError('bad value')) == '<spec>: bad value'


def test_apply_overrides():
    spec = specfile.preset_spec('desk')
    spec = specfile.apply_overrides(spec, ['stop.max_iters=500',
                                           'scenario.num_active=3',
                                           'policies.1.epsilon=0.9',
                                           'output_dir=runs/a'])
    assert spec.stop.max_iters == 500
    assert spec.scenario.num_active == 3
    assert spec.policies[1].epsilon == pytest.approx(0.9)
    assert spec.output_dir == 'runs/a'


def test_apply_overrides_creates_adc_section():
    spec = specfile.apply_overrides(specfile.preset_spec('toy'),
                                    ['adc.bits=3'])
    assert spec.adc == QuantizerConfig(bits=3)


@pytest.mark.parametrize("assignment", ['stop.max_iters', 'stop.speed=3'])
def test_apply_overrides_rejects_bad_assignments(assignment):
    with pytest.raises(SpecError):
        specfile.apply_overrides(specfile.preset_spec('toy'), [assignment])


def test_quantizer_variants():
    assert ExperimentSpec().quantizers() == [None]
    spec = ExperimentSpec(adc=QuantizerConfig(bits=3))
    assert spec.quantizers() == [QuantizerConfig(bits=3)]
    spec = ExperimentSpec(adc={'bits': 3, 'step': 0.25},
                          adc_sweep_bits=[1, 2])
    variants = spec.quantizers()
    assert variants[0] is None
    assert [v.bits for v in variants[1:]] == [1, 2]
    assert all(v.step == 0.25 for v in variants[1:])


def test_probe_period_defaults_to_a_tenth_of_the_coordinates():
    spec = specfile.preset_spec('desk')
    assert spec.resolved_probe_period() == 20
    assert specfile.preset_spec('toy').resolved_probe_period() == 1


def test_locate_key_follows_nesting():
    text = slurp_fixture('specs/small.json')
    assert specfile.locate_key(text, ('scenario', 'num_active')) == 7
    assert specfile.locate_key(text, ('stop',)) == 15
    assert specfile.locate_key(text, ('missing',)) is None
