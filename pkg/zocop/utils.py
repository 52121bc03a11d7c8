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

import math

import numpy as np
from oslo_log import log as logging

from zocop import errors

LOG = logging.getLogger(__name__)


def read_params_from_file(filepath):
    """Extract key = value pairs from a file.

    Blank lines and lines starting with ``#`` are ignored. Values may
    contain whitespace; everything after the first ``=`` belongs to the
    value.

    :param filepath: path to a file with one key = value pair per line.
    :raises: ZocopIOError if the file cannot be read.
    :raises: ProblemFileError if a line has no ``=``.
    :returns: a dictionary representing the content of the file
    """
    try:
        with open(filepath) as f:
            lines = f.read().splitlines()
    except (IOError, OSError) as e:
        raise errors.ZocopIOError(filepath, e)

    params = {}
    for number, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise errors.ProblemFileError(
                '%s line %d: expected key = value' % (filepath, number))
        k, v = line.split('=', 1)
        params[k.strip()] = v.strip()

    return params


def as_vector(value, name, length=None):
    """Convert value into a finite 1-D float array.

    :param value: anything numpy can turn into a 1-D array.
    :param name: name used in error messages.
    :param length: expected length, if known.
    :raises: DimensionMismatchError on a shape problem.
    :raises: InvalidInputError on non-finite entries.
    :returns: a new float64 array.
    """
    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise errors.DimensionMismatchError(
            '%s must be a vector, got shape %s' % (name, arr.shape))
    if length is not None and arr.shape[0] != length:
        raise errors.DimensionMismatchError(
            '%s must have %d entries, got %d' % (name, length, arr.shape[0]))
    if not np.all(np.isfinite(arr)):
        raise errors.InvalidInputError('%s has non-finite entries' % name)
    return arr


def as_matrix(value, name, shape=None):
    """Convert value into a finite 2-D float array.

    :param value: anything numpy can turn into a 2-D array.
    :param name: name used in error messages.
    :param shape: expected shape, if known.
    :raises: DimensionMismatchError on a shape problem.
    :raises: InvalidInputError on non-finite or empty input.
    :returns: a new float64 array.
    """
    arr = np.array(value, dtype=float)
    if arr.ndim != 2:
        raise errors.DimensionMismatchError(
            '%s must be a matrix, got shape %s' % (name, arr.shape))
    if arr.size == 0:
        raise errors.InvalidInputError('%s is empty' % name)
    if shape is not None and arr.shape != tuple(shape):
        raise errors.DimensionMismatchError(
            '%s must have shape %s, got %s' % (name, tuple(shape),
                                               arr.shape))
    if not np.all(np.isfinite(arr)):
        raise errors.InvalidInputError('%s has non-finite entries' % name)
    return arr


def readonly(arr):
    """Mark an array as read-only and return it."""
    arr.setflags(write=False)
    return arr


class AccumulatedFailures(object):
    """Collects validation failures so they are reported together.

    :param subject: what is being validated, used as the message heading.
    :param exc_class: exception raised by :meth:`raise_if_needed`.
    """

    def __init__(self, subject='configuration',
                 exc_class=errors.ConfigValidationError):
        self.subject = subject
        self._failures = []
        self._exc_class = exc_class

    def add(self, fail, *fmt):
        """Record a failure, %-formatting it when arguments are given."""
        if fmt:
            fail = fail % fmt
        LOG.error('Invalid %(subject)s: %(fail)s',
                  {'subject': self.subject, 'fail': fail})
        self._failures.append(str(fail))

    def check_positive(self, values):
        """Record every entry of ``values`` that is not a finite x > 0.

        None entries are skipped.
        """
        for name, value in sorted(values.items()):
            if value is not None and not (math.isfinite(value)
                                          and value > 0):
                self.add('%s must be positive and finite, got %s',
                         name, value)

    def check_nonnegative(self, values):
        """Record every entry of ``values`` that is not a finite x >= 0."""
        for name, value in sorted(values.items()):
            if value is not None and not (math.isfinite(value)
                                          and value >= 0):
                self.add('%s must be finite and nonnegative, got %s',
                         name, value)

    def get_error(self):
        """The combined message, or None without failures."""
        if not self._failures:
            return None
        return 'Invalid %s:\n%s' % (
            self.subject, '\n'.join('* %s' % item for item in self._failures))

    def raise_if_needed(self):
        """:raises: the configured exception class if anything failed."""
        if self._failures:
            raise self._exc_class(self.get_error())

    def __len__(self):
        return len(self._failures)
