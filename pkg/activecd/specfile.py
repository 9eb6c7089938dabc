# -*- coding: utf-8 -*-

"""
Experiment specs: a JSON document with nested sections, merged over a named
preset, validated into attrs records, and serialized back losslessly.

Example::

    {
        "preset": "desk",
        "scenario": {"num_devices": 100, "master_seed": 7},
        "policies": [{"name": "random"},
                     {"name": "bernoulli", "epsilon": 0.6}],
        "stop": {"rel_tol": 1e-6, "max_iters": 10000, "window": 200},
        "adc": {"bits": 3, "step": 0.5},
        "num_seeds": 20
    }
"""

import copy
import json
import re

import attr

from .adc import QuantizerConfig
from .define import (PRESETS, SPEC_SCHEMA_VERSION, EMIT_CHOICES,
                     REFACTOR_PERIOD)
from .model import SystemConfig
from .policies import PolicyConfig
from .solver import StopRule
from .utils import ConfigError


class SpecError(BaseException):
    """
    Raised if an experiment spec cannot be read or validated. lineno points
    at the offending line of the spec file when it is known.
    """

    def __init__(self, message, lineno=None, filename=None):
        super(SpecError, self).__init__(message)
        self.message = message
        self.lineno = lineno
        self.filename = filename

    def __str__(self):
        where = self.filename or '<spec>'
        if self.lineno is not None:
            return '%s:%d: %s' % (where, self.lineno, self.message)
        return '%s: %s' % (where, self.message)


class SchemaError(SpecError):
    """
    Raised if a results file misses required columns or carries an unknown
    major schema version.
    """


def _tuple_of(converter):
    def convert(values):
        return tuple(converter(value) for value in values)
    return convert


def _optional(cls):
    def convert(value):
        if value is None or isinstance(value, cls):
            return value
        return cls(**value)
    return convert


def _optional_int(value):
    return None if value is None else int(value)


@attr.s(frozen=True)
class ExperimentSpec(object):
    """
    Everything needed to run and reproduce one batch of cells
    (policy x ADC variant x replicate).
    """
    scenario = attr.ib(default=attr.Factory(SystemConfig))
    policies = attr.ib(default=(PolicyConfig('random'),))
    stop = attr.ib(default=attr.Factory(StopRule))
    adc = attr.ib(default=None, converter=_optional(QuantizerConfig))
    adc_sweep_bits = attr.ib(default=(), converter=_tuple_of(int))
    num_seeds = attr.ib(default=1, converter=int)
    output_dir = attr.ib(default='results')
    emit = attr.ib(default=('traces', 'summaries', 'aggregate_csv'),
                   converter=_tuple_of(str))
    reference = attr.ib(default=True, converter=bool)
    probe_period = attr.ib(default=None, converter=_optional_int)
    refactor_period = attr.ib(default=REFACTOR_PERIOD, converter=int)
    preset = attr.ib(default=None)
    schema_version = attr.ib(default=SPEC_SCHEMA_VERSION)

    def __attrs_post_init__(self):
        if self.num_seeds < 1:
            raise ConfigError('num_seeds must be at least 1')
        if not self.policies:
            raise ConfigError('at least one policy is required')
        for item in self.emit:
            if item not in EMIT_CHOICES:
                raise ConfigError('unknown emit target %r; expected %s'
                                  % (item, ', '.join(EMIT_CHOICES)))
        if any(bits < 1 for bits in self.adc_sweep_bits):
            raise ConfigError('adc_sweep_bits entries must be positive')
        if self.probe_period is not None and self.probe_period < 1:
            raise ConfigError('probe_period must be at least 1')
        if self.refactor_period < 1:
            raise ConfigError('refactor_period must be at least 1')
        labels = [policy.display_name for policy in self.policies]
        if len(set(labels)) != len(labels):
            raise ConfigError('policy names must be unique; give repeated '
                              'policies distinct labels')

    def quantizers(self):
        """
        ADC variants of every replicate: unquantized, the single adc entry,
        or unquantized plus one quantizer per swept bit depth.

        @rtype: [QuantizerConfig or None]
        """
        if self.adc_sweep_bits:
            base = self.adc or QuantizerConfig(bits=1)
            return [None] + [attr.evolve(base, bits=bits,
                                         per_antenna_bits=None)
                             for bits in self.adc_sweep_bits]
        return [self.adc]

    def resolved_probe_period(self):
        if self.probe_period is not None:
            return self.probe_period
        return max(1, self.scenario.num_coords // 10)


SECTION_CLASSES = {
    'scenario': SystemConfig,
    'stop': StopRule,
    'adc': QuantizerConfig,
}

TOP_LEVEL_KEYS = tuple(a.name for a in attr.fields(ExperimentSpec))


def _field_names(cls):
    return tuple(a.name for a in attr.fields(cls))


def locate_key(text, path):
    """
    Best-effort line number (1-based) of a dotted key path inside the JSON
    text, following each component in order.

    @param path: Key components, e.g. ('scenario', 'num_active').
    @type path: tuple

    @rtype: int or None
    """
    if not text:
        return None
    lines = text.splitlines()
    start = 0
    found = None
    for component in path:
        if isinstance(component, int):
            continue
        pattern = re.compile(r'"%s"\s*:' % re.escape(component))
        for index in range(start, len(lines)):
            if pattern.search(lines[index]):
                found = index + 1
                start = index + 1
                break
        else:
            return found
    return found


def merge_dicts(base, override):
    """
    Recursive dict merge; lists and scalars in override replace those of
    base.
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_dicts(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _dotted(path):
    return '.'.join(str(component) for component in path)


def _build_section(cls, payload, path, text, filename):
    if not isinstance(payload, dict):
        raise SpecError('section %s must be an object' % _dotted(path),
                        locate_key(text, path), filename)
    allowed = _field_names(cls)
    for key in payload:
        if key not in allowed:
            raise SpecError('unknown key %r in %s' % (key, _dotted(path)),
                            locate_key(text, path + (key,)), filename)
    try:
        return cls(**payload)
    except (ConfigError, TypeError, ValueError) as e:
        bad_key = _guess_key(str(e), payload)
        location = path + (bad_key,) if bad_key else path
        raise SpecError('%s: %s' % (_dotted(path), e),
                        locate_key(text, location), filename)


def _guess_key(message, payload):
    for key in sorted(payload, key=len, reverse=True):
        if key in message:
            return key
    return None


def spec_from_dict(data, text=None, filename=None):
    """
    Validate a spec dictionary (already merged or not) into ExperimentSpec.

    @param data: Parsed spec.
    @type data: dict

    @param text: Raw spec text, used to anchor diagnostics to lines.
    @type text: str

    @rtype: ExperimentSpec
    """
    if not isinstance(data, dict):
        raise SpecError('spec must be a JSON object', 1, filename)

    preset = data.get('preset')
    if preset is not None:
        if preset not in PRESETS:
            raise SpecError('unknown preset %r; expected one of %s'
                            % (preset, ', '.join(sorted(PRESETS))),
                            locate_key(text, ('preset',)), filename)
        data = merge_dicts(PRESETS[preset], data)

    for key in data:
        if key not in TOP_LEVEL_KEYS:
            raise SpecError('unknown key %r' % key,
                            locate_key(text, (key,)), filename)

    version = str(data.get('schema_version', SPEC_SCHEMA_VERSION))
    if version.split('.')[0] != SPEC_SCHEMA_VERSION.split('.')[0]:
        raise SpecError('unsupported spec schema version %s' % version,
                        locate_key(text, ('schema_version',)), filename)

    kwargs = {}
    for key, value in data.items():
        if key in SECTION_CLASSES:
            if value is None:
                kwargs[key] = None
            else:
                kwargs[key] = _build_section(SECTION_CLASSES[key], value,
                                             (key,), text, filename)
        elif key == 'policies':
            if not isinstance(value, list):
                raise SpecError('policies must be a list',
                                locate_key(text, ('policies',)), filename)
            kwargs[key] = tuple(
                _build_section(PolicyConfig, item, ('policies', index),
                               text, filename)
                for index, item in enumerate(value))
        else:
            kwargs[key] = value
    try:
        return ExperimentSpec(**kwargs)
    except (ConfigError, TypeError, ValueError) as e:
        bad_key = _guess_key(str(e), kwargs)
        raise SpecError(str(e),
                        locate_key(text, (bad_key,)) if bad_key else None,
                        filename)


def spec_to_dict(spec):
    """
    Fully resolved, JSON-serializable form of a spec. Every value is
    spelled out, so merging the named preset again on reading is a no-op.
    """
    return attr.asdict(spec, recurse=True, retain_collection_types=False)


def parse_spec_text(text, filename=None):
    try:
        data = json.loads(text)
    except ValueError as e:
        raise SpecError('invalid JSON: %s' % getattr(e, 'msg', e),
                        getattr(e, 'lineno', None), filename)
    return spec_from_dict(data, text=text, filename=filename)


def load_spec(filename):
    """
    Read and validate a spec file.

    @rtype: ExperimentSpec
    """
    try:
        with open(filename) as file_object:
            text = file_object.read()
    except (IOError, OSError) as e:
        raise SpecError('cannot read spec: %s' % e, None, filename)
    return parse_spec_text(text, filename=filename)


def preset_spec(name):
    if name not in PRESETS:
        raise SpecError('unknown preset %r' % name)
    return spec_from_dict({'preset': name})


def dumps_spec(spec):
    return json.dumps(spec_to_dict(spec), indent=4, sort_keys=True) + '\n'


def _coerce_override(raw):
    try:
        return json.loads(raw)
    except ValueError:
        return raw


def apply_overrides(spec, assignments):
    """
    Apply dotted-path assignments such as 'scenario.num_active=5' or
    'stop.window=200' to a spec.

    @param assignments: List of KEY=VALUE strings; values are parsed as
        JSON when possible and kept as strings otherwise.
    @type assignments: [str]

    @rtype: ExperimentSpec
    """
    data = spec_to_dict(spec)
    for assignment in assignments:
        if '=' not in assignment:
            raise SpecError('override %r is not of the form KEY=VALUE'
                            % assignment)
        path, raw = assignment.split('=', 1)
        keys = path.strip().split('.')
        target = data
        for key in keys[:-1]:
            if key.isdigit() and isinstance(target, list):
                target = target[int(key)]
                continue
            if target.get(key) is None:
                target[key] = {}
            target = target[key]
        last = keys[-1]
        if last.isdigit() and isinstance(target, list):
            target[int(last)] = _coerce_override(raw)
        else:
            target[last] = _coerce_override(raw)
    return spec_from_dict(data, filename='<overrides>')
