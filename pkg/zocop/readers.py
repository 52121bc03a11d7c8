# Copyright 2026 The zocop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Dataset readers, problem files and the CSV trace format."""

import csv
import math
import re

import numpy as np
from oslo_log import log
from oslo_utils import excutils

from zocop import apps
from zocop import core
from zocop import errors
from zocop import ialm
from zocop import utils

LOG = log.getLogger(__name__)

_INT_TRACE_FIELDS = frozenset(['k', 'inner_iterations', 'zero_one_loss'])
_SEPARATOR = re.compile(r'[\s,]+')


def _read_lines(path):
    try:
        with open(path) as f:
            return f.read().splitlines()
    except (IOError, OSError) as e:
        raise errors.ZocopIOError(path, e)


def _parse_real(text, path, line, what='value'):
    try:
        value = float(text)
    except ValueError:
        raise errors.DatasetParseError(
            path, line, 'non-numeric %s %r' % (what, text))
    if not math.isfinite(value):
        raise errors.DatasetParseError(
            path, line, 'non-finite %s %r' % (what, text))
    return value


def _parse_features(tokens, path, line):
    features = {}
    for token in tokens:
        index, sep, value = token.partition(':')
        if not sep:
            raise errors.DatasetParseError(
                path, line, 'expected index:value, got %r' % token)
        try:
            index = int(index)
        except ValueError:
            raise errors.DatasetParseError(
                path, line, 'invalid feature index %r' % index)
        if index < 1:
            raise errors.DatasetParseError(
                path, line, 'feature indices are 1-based, got %d' % index)
        features[index - 1] = _parse_real(value, path, line)
    return features


def _dense(rows, num_features):
    width = max([max(r, default=-1) + 1 for r in rows] + [num_features or 0])
    X = np.zeros((len(rows), width))
    for i, features in enumerate(rows):
        for j, value in features.items():
            X[i, j] = value
    return X


def _data_lines(path):
    lines = [(number, line.strip())
             for number, line in enumerate(_read_lines(path), 1)]
    lines = [(number, line) for number, line in lines if line]
    if not lines:
        raise errors.DatasetParseError(path, 1, 'file is empty')
    return lines


def read_libsvm(path, num_features=None):
    """Read a binary LIBSVM file ``label idx:val idx:val ...``.

    Indices are 1-based and absent features are 0. Labels in {0, 1} are
    mapped to {-1, +1}.

    :param path: file to read.
    :param num_features: minimum number of columns of X.
    :raises: ZocopIOError if the file cannot be read.
    :raises: DatasetParseError with the line number of a malformed line.
    :returns: a :class:`zocop.apps.LabeledDataset`.
    """
    rows, labels, numbers = [], [], []
    for number, line in _data_lines(path):
        tokens = line.split()
        labels.append(_parse_real(tokens[0], path, number, 'label'))
        rows.append(_parse_features(tokens[1:], path, number))
        numbers.append(number)

    y = np.array(labels)
    if not np.all((y == 1) | (y == -1)):
        if np.all((y == 0) | (y == 1)):
            LOG.info('Labels of %s are in {0, 1}, mapping 0 to -1', path)
            y = np.where(y == 1, 1.0, -1.0)
        else:
            bad = np.flatnonzero(~np.isin(y, (-1.0, 0.0, 1.0)))
            if not bad.size:
                # -1 mixed with 0
                bad = np.flatnonzero(y == 0)
            bad = int(bad[0])
            raise errors.DatasetParseError(
                path, numbers[bad],
                'labels must be in {-1, +1} or {0, 1}, got %g' % y[bad])
    return apps.LabeledDataset(_dense(rows, num_features), y=y)


def read_libsvm_multilabel(path, num_features=None, num_labels=None):
    """Read a multi-label LIBSVM file ``l1,l2 idx:val ...``.

    Labels are 0-based indices of the positive labels of a row; the row
    may have none. Y holds +1 for listed labels and -1 elsewhere.

    :raises: ZocopIOError or DatasetParseError.
    :returns: a :class:`zocop.apps.LabeledDataset` with Y set.
    """
    rows, positives = [], []
    for number, line in _data_lines(path):
        tokens = line.split()
        current = set()
        if ':' not in tokens[0]:
            for text in tokens.pop(0).split(','):
                try:
                    label = int(text)
                except ValueError:
                    raise errors.DatasetParseError(
                        path, number, 'invalid label %r' % text)
                if label < 0:
                    raise errors.DatasetParseError(
                        path, number, 'negative label %d' % label)
                current.add(label)
        positives.append(current)
        rows.append(_parse_features(tokens, path, number))

    seen = max([max(p, default=-1) + 1 for p in positives])
    m = max(seen, num_labels or 0)
    if m == 0:
        raise errors.DatasetParseError(path, 1, 'no labels found')
    Y = -np.ones((len(rows), m))
    for i, current in enumerate(positives):
        for label in current:
            Y[i, label] = 1.0
    return apps.LabeledDataset(_dense(rows, num_features), Y=Y)


def read_csv_regression(path):
    """Read a CSV whose last column is the response.

    A first row with a non-numeric cell is taken as a header and skipped.

    :raises: ZocopIOError or DatasetParseError (with the row number).
    :returns: a :class:`zocop.apps.LabeledDataset` with real y.
    """
    lines = _read_lines(path)
    records = [(number, row) for number, row
               in enumerate(csv.reader(lines), 1) if row]
    if records:
        try:
            [float(cell) for cell in records[0][1]]
        except ValueError:
            LOG.debug('Skipping header of %s', path)
            records = records[1:]
    if not records:
        raise errors.DatasetParseError(path, 1, 'file is empty')

    width = len(records[0][1])
    if width < 2:
        raise errors.DatasetParseError(
            path, records[0][0], 'need at least one feature and a response')
    values = []
    for number, row in records:
        if len(row) != width:
            raise errors.DatasetParseError(
                path, number,
                'row has %d columns, expected %d' % (len(row), width))
        values.append([_parse_real(cell.strip(), path, number)
                       for cell in row])
    data = np.array(values)
    return apps.LabeledDataset(data[:, :-1], y=data[:, -1])


def _format_trace_value(field, value):
    if field in _INT_TRACE_FIELDS:
        return '%d' % value
    return '%.17g' % value


def write_trace(trace, path):
    """Write outer iteration records as CSV.

    Reals use 17 significant digits so reading them back is exact.

    :param trace: iterable of :class:`zocop.ialm.IterationRecord`.
    :raises: ZocopIOError on I/O failures.
    """
    try:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(ialm.TRACE_FIELDS)
            try:
                for record in trace:
                    writer.writerow(
                        [_format_trace_value(field, value) for field, value
                         in zip(ialm.TRACE_FIELDS, record)])
            except Exception:
                with excutils.save_and_reraise_exception():
                    LOG.error('Writing trace %s failed, the file is '
                              'incomplete', path)
    except (IOError, OSError) as e:
        raise errors.ZocopIOError(path, e)


def read_trace(path):
    """Parse a trace written by :func:`write_trace`.

    :raises: ZocopIOError or TraceFormatError.
    :returns: a list of :class:`zocop.ialm.IterationRecord`.
    """
    rows = list(csv.reader(_read_lines(path)))
    if not rows or tuple(rows[0]) != ialm.TRACE_FIELDS:
        raise errors.TraceFormatError(
            '%s: header must be %s' % (path, ','.join(ialm.TRACE_FIELDS)))

    trace = []
    for number, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != len(ialm.TRACE_FIELDS):
            raise errors.TraceFormatError(
                '%s line %d: expected %d fields, got %d'
                % (path, number, len(ialm.TRACE_FIELDS), len(row)))
        try:
            values = [int(text) if field in _INT_TRACE_FIELDS
                      else float(text)
                      for field, text in zip(ialm.TRACE_FIELDS, row)]
        except ValueError as e:
            raise errors.TraceFormatError(
                '%s line %d: %s' % (path, number, e))
        trace.append(ialm.IterationRecord(*values))
    return trace


def _parse_numbers(text, key):
    items = [item for item in _SEPARATOR.split(text.strip()) if item]
    try:
        return [float(item) for item in items]
    except ValueError:
        raise errors.ProblemFileError(
            '%s: entries must be numeric, got %r' % (key, text))


def _parse_matrix(text, key):
    rows = [_parse_numbers(row, key) for row in text.split(';')
            if row.strip()]
    if not rows or len(set(len(row) for row in rows)) != 1:
        raise errors.ProblemFileError(
            '%s: rows must be nonempty and of equal length' % key)
    return np.array(rows)


def read_problem_file(path):
    """Read a quadratic problem from a ``key = value`` file.

    Keys are H, c, d, A, b and lambda. Matrix rows are separated by ``;``
    and entries by whitespace or commas. c defaults to zero and d to 0.

    :raises: ZocopIOError, ProblemFileError or a validation error from
        building the problem.
    :returns: a :class:`zocop.core.CopProblem` with a quadratic objective.
    """
    params = utils.read_params_from_file(path)
    missing = [key for key in ('H', 'A', 'b', 'lambda') if key not in params]
    if missing:
        raise errors.ProblemFileError(
            '%s: missing keys %s' % (path, ', '.join(missing)))
    unknown = set(params) - {'H', 'c', 'd', 'A', 'b', 'lambda'}
    if unknown:
        LOG.warning('Ignoring unknown keys in %(path)s: %(keys)s',
                    {'path': path, 'keys': ', '.join(sorted(unknown))})

    H = _parse_matrix(params['H'], 'H')
    c = _parse_numbers(params['c'], 'c') if 'c' in params else None
    d = _parse_numbers(params.get('d', '0'), 'd')
    lam = _parse_numbers(params['lambda'], 'lambda')
    if len(d) != 1 or len(lam) != 1:
        raise errors.ProblemFileError('%s: d and lambda are scalars' % path)
    objective = core.SmoothObjective.quadratic(H, c, d[0])
    return core.CopProblem(objective, _parse_matrix(params['A'], 'A'),
                           _parse_numbers(params['b'], 'b'), lam[0])
