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


def _plain(value):
    """Convert numpy containers and scalars into plain Python values."""
    if isinstance(value, Serializable):
        return value.serialize()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    return value


class Serializable(object):
    """Base class for things that can be serialized."""
    serializable_fields = ()

    def serialize(self):
        """Turn this object into a dict of plain Python values."""
        return dict((f, _plain(getattr(self, f)))
                    for f in self.serializable_fields)


class SerializableComparable(Serializable):
    """A Serializable class which supports some comparison operators

    This class supports the '__eq__' and '__ne__' comparison operators, but
    intentionally disables the '__hash__' operator as some child classes
    hold numpy arrays.  The comparison operators are mainly used to assist
    with unit testing.
    """

    __hash__ = None

    def __eq__(self, other):
        return self.serialize() == other.serialize()

    def __ne__(self, other):
        return self.serialize() != other.serialize()


def format_value(value):
    """Render a single value for flat key=value output.

    Booleans become ``true``/``false``, ``None`` becomes ``unknown`` and
    floats use the shortest representation that round-trips.
    """
    value = _plain(value)
    if value is None:
        return 'unknown'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    if isinstance(value, list):
        return ' '.join(format_value(v) for v in value)
    return str(value)


def to_key_value_lines(mapping, prefix=''):
    """Flatten a mapping into sorted ``key=value`` lines.

    Nested mappings are flattened with dotted keys.

    :param mapping: a dict or a :class:`Serializable`.
    :param prefix: prefix prepended to every key.
    :returns: a list of strings without trailing newlines.
    """
    if isinstance(mapping, Serializable):
        mapping = mapping.serialize()
    lines = []
    for key in sorted(mapping):
        value = mapping[key]
        if isinstance(value, Serializable):
            value = value.serialize()
        if isinstance(value, dict):
            lines.extend(to_key_value_lines(value, '%s%s.' % (prefix, key)))
        else:
            lines.append('%s%s=%s' % (prefix, key, format_value(value)))
    return lines
