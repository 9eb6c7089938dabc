# -*- coding: utf-8 -*-

"""
Turn the per-cell outputs of one or more experiment directories into long
figure tables (figure, series, seed, x, y), one row per plotted point plus
median rows across seeds, and optionally render them as SVG plots.

Figures:
  convergence      suboptimality F^t - F* per iteration, unquantized runs
  detection_time   missed-detection probability against solver time
  adc_convergence  suboptimality per iteration for every ADC resolution
  adc_detection    final missed-detection probability per ADC resolution
"""

import csv
import io
import logging
import os

import attr
import numpy as np

from .define import (AGGREGATE_FILE, AGGREGATE_COLUMNS, AGGREGATE_SCHEMA,
                     TRACE_SCHEMA, PROBE_SCHEMA, FIGURE_SCHEMA, FIGURE_COLUMNS)
from .formatting import (get_trace_filename, get_summary_filename,
                         get_probe_filename)
from .solver import objective_floor, suboptimality_series
from .specfile import SchemaError
from .utils import mkdir_p, slurp_json, write_atomically, format_float

MEDIAN = 'median'

FIGURE_FILES = {
    'convergence': 'fig_convergence.csv',
    'detection_time': 'fig_detection_time.csv',
    'adc_convergence': 'fig_adc_convergence.csv',
    'adc_detection': 'fig_adc_detection.csv',
}


def read_table(filename, schema, required=()):
    """
    Read a CSV results file whose first line is '# <name> <version>'.

    @param schema: Expected (name, version); only the major version has to
        match.
    @type schema: (str, str)

    @param required: Columns that must be present.
    @type required: tuple

    @return: Rows as dictionaries.
    @rtype: [dict]
    """
    with open(filename, newline='') as file_object:
        first = file_object.readline().strip()
        parts = first.lstrip('#').split()
        if (not first.startswith('#') or len(parts) != 2
                or parts[0] != schema[0]):
            raise SchemaError('missing "# %s %s" schema line' % schema,
                              1, filename)
        if parts[1].split('.')[0] != schema[1].split('.')[0]:
            raise SchemaError('unsupported %s schema version %s'
                              % (schema[0], parts[1]), 1, filename)
        reader = csv.DictReader(file_object)
        missing = [c for c in required if c not in (reader.fieldnames or ())]
        if missing:
            raise SchemaError('missing columns: %s' % ', '.join(missing),
                              2, filename)
        return list(reader)


@attr.s
class CellRecord(object):
    """
    Everything the figures need from one successful cell.
    """
    group = attr.ib()
    policy = attr.ib()
    adc_bits = attr.ib()
    seed = attr.ib()
    final_F = attr.ib()
    p_md = attr.ib()
    objectives = attr.ib(default=None, repr=False)
    reference_F = attr.ib(default=None)
    probes = attr.ib(default=None, repr=False)

    @property
    def series_prefix(self):
        return '%s/' % self.group if self.group else ''


def _optional_float(value):
    return None if value in ('', None) else float(value)


def load_directory(directory, group=''):
    """
    Collect the successful cells of one results directory.

    @rtype: [CellRecord]
    """
    rows = read_table(os.path.join(directory, AGGREGATE_FILE),
                      AGGREGATE_SCHEMA, AGGREGATE_COLUMNS)
    records = []
    for row in rows:
        if row['status'] != 'ok':
            logging.info('Skipping %s cell (%s, %s bits, seed %s)',
                         row['status'], row['policy'], row['adc_bits'],
                         row['seed'])
            continue
        record = CellRecord(group=group, policy=row['policy'],
                            adc_bits=int(row['adc_bits']),
                            seed=int(row['seed']),
                            final_F=float(row['final_F']),
                            p_md=_optional_float(row['p_md']))

        args = (directory, record.policy, record.adc_bits, record.seed)
        trace_file = get_trace_filename(*args)
        if os.path.isfile(trace_file):
            trace = read_table(trace_file, TRACE_SCHEMA, ('t', 'F'))
            initial = None
            summary_file = get_summary_filename(*args)
            if os.path.isfile(summary_file):
                summary = slurp_json(summary_file)
                initial = summary.get('initial_F')
                record.reference_F = summary.get('reference_F')
            values = [float(r['F']) for r in trace]
            if initial is not None:
                values = [float(initial)] + values
            record.objectives = np.array(values)

        probe_file = get_probe_filename(*args)
        if os.path.isfile(probe_file):
            record.probes = [
                (int(r['t']), float(r['elapsed_s']), float(r['p_md']))
                for r in read_table(probe_file, PROBE_SCHEMA,
                                    ('t', 'elapsed_s', 'p_md'))]
        records.append(record)
    return records


def load_results(inputs):
    """
    Load several results directories; series are prefixed with the
    directory name when there is more than one.
    """
    records = []
    for directory in inputs:
        group = os.path.basename(os.path.normpath(directory)) \
            if len(inputs) > 1 else ''
        records.extend(load_directory(directory, group))
    return records


def _floors(records):
    """
    F* per (group, seed, adc_bits): the reference objective and every
    observed objective of the policies sharing that problem.
    """
    grouped = {}
    for record in records:
        if record.objectives is None:
            continue
        key = (record.group, record.seed, record.adc_bits)
        grouped.setdefault(key, []).append(record)

    floors = {}
    for key, members in grouped.items():
        references = [r.reference_F for r in members
                      if r.reference_F is not None]
        reference = min(references) if references else None
        finals = [float(np.min(r.objectives)) for r in members]
        floors[key] = objective_floor(reference, finals)
    return floors


def _pad(series_list):
    """
    Stack series of different lengths, extending each with its last value
    (the objective of a stopped run stays put).
    """
    length = max(len(s) for s in series_list)
    padded = np.empty((len(series_list), length))
    for row, series in enumerate(series_list):
        padded[row, :len(series)] = series
        padded[row, len(series):] = series[-1]
    return padded


def _series_rows(figure, series_by_name):
    rows = []
    for name in sorted(series_by_name):
        by_seed = series_by_name[name]
        for seed in sorted(by_seed):
            for x, y in enumerate(by_seed[seed]):
                rows.append((figure, name, str(seed), str(x), format_float(y)))
        median = np.median(_pad([by_seed[s] for s in sorted(by_seed)]),
                           axis=0)
        for x, y in enumerate(median):
            rows.append((figure, name, MEDIAN, str(x), format_float(y)))
    return rows


def convergence_rows(records, floors, figure='convergence', adc_only=None):
    """
    Suboptimality series; with adc_only=False the unquantized runs keyed by
    policy, otherwise every ADC variant keyed by policy and resolution.
    """
    series = {}
    for record in records:
        if record.objectives is None:
            continue
        if adc_only is False and record.adc_bits != 0:
            continue
        f_star = floors[(record.group, record.seed, record.adc_bits)]
        name = record.series_prefix + record.policy
        if adc_only is not False:
            name += '/b%d' % record.adc_bits
        series.setdefault(name, {})[record.seed] = suboptimality_series(
            record.objectives, f_star)
    return _series_rows(figure, series)


def detection_time_rows(records):
    series = {}
    for record in records:
        if not record.probes or record.adc_bits != 0:
            continue
        name = record.series_prefix + record.policy
        series.setdefault(name, {})[record.seed] = record.probes

    rows = []
    for name in sorted(series):
        by_seed = series[name]
        for seed in sorted(by_seed):
            for _, elapsed_s, p_md in by_seed[seed]:
                rows.append(('detection_time', name, str(seed),
                             format_float(elapsed_s), format_float(p_md)))
        # medians over the probe index that every seed reached
        depth = min(len(probes) for probes in by_seed.values())
        for index in range(depth):
            column = [by_seed[s][index] for s in sorted(by_seed)]
            rows.append(('detection_time', name, MEDIAN,
                         format_float(np.median([c[1] for c in column])),
                         format_float(np.median([c[2] for c in column]))))
    return rows


def adc_detection_rows(records):
    points = {}
    for record in records:
        if record.p_md is None:
            continue
        name = record.series_prefix + record.policy
        points.setdefault(name, {}).setdefault(record.adc_bits, {})[
            record.seed] = record.p_md

    rows = []
    for name in sorted(points):
        for bits in sorted(points[name]):
            by_seed = points[name][bits]
            for seed in sorted(by_seed):
                rows.append(('adc_detection', name, str(seed), str(bits),
                             format_float(by_seed[seed])))
            rows.append(('adc_detection', name, MEDIAN, str(bits),
                         format_float(np.median(list(by_seed.values())))))
    return rows


def figure_table(rows):
    out = io.StringIO()
    out.write('# %s %s\n' % FIGURE_SCHEMA)
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(FIGURE_COLUMNS)
    writer.writerows(rows)
    return out.getvalue()


def render_svg(rows, filename, title, xlabel, ylabel, logy=False):
    """
    Plot the median rows of a figure table.
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    series = {}
    for _, name, seed, x, y in rows:
        if seed != MEDIAN or y == '':
            continue
        series.setdefault(name, ([], []))
        series[name][0].append(float(x))
        series[name][1].append(float(y))

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted(series):
        xs, ys = series[name]
        if logy:
            ys = np.maximum(ys, np.finfo(float).tiny)
        ax.plot(xs, ys, label=name)
    if logy:
        ax.set_yscale('log')
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which='both', alpha=0.3)
    if series:
        ax.legend(fontsize='small')
    fig.savefig(filename, bbox_inches='tight')
    plt.close(fig)


PLOT_LABELS = {
    'convergence': ('Convergence', 'iteration t', 'F - F*', True),
    'detection_time': ('Detection vs time', 'time [s]', 'P_md', False),
    'adc_convergence': ('Convergence with low-resolution ADC', 'iteration t',
                        'F - F*', True),
    'adc_detection': ('Detection vs ADC resolution', 'bits (0: ideal)',
                      'P_md', False),
}


def make_figures(inputs, out_dir, svg=False):
    """
    Write every figure table that the inputs carry data for.

    @param inputs: Results directories written by the solve command.
    @type inputs: [str]

    @return: Names of the files written.
    @rtype: [str]
    """
    records = load_results(inputs)
    if not records:
        logging.warning('No successful cells found in %s', ', '.join(inputs))
    floors = _floors(records)
    has_adc = any(r.adc_bits for r in records)

    tables = {
        'convergence': convergence_rows(records, floors, adc_only=False),
        'detection_time': detection_time_rows(records),
    }
    if has_adc:
        tables['adc_convergence'] = convergence_rows(
            records, floors, figure='adc_convergence')
        tables['adc_detection'] = adc_detection_rows(records)

    mkdir_p(out_dir)
    written = []
    for figure in sorted(tables):
        rows = tables[figure]
        if not rows:
            logging.info('No data for figure %s', figure)
            continue
        filename = os.path.join(out_dir, FIGURE_FILES[figure])
        write_atomically(filename, figure_table(rows))
        written.append(filename)
        logging.info('Wrote %s (%d rows)', filename, len(rows))
        if svg:
            title, xlabel, ylabel, logy = PLOT_LABELS[figure]
            svg_file = os.path.splitext(filename)[0] + '.svg'
            render_svg(rows, svg_file, title, xlabel, ylabel, logy)
            written.append(svg_file)
    return written
