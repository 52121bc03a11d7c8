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

import numpy as np

from zocop import encoding
from zocop.tests.unit import base


class SerializableTesting(encoding.Serializable):
    serializable_fields = ('jack', 'jill')

    def __init__(self, jack, jill):
        self.jack = jack
        self.jill = jill


class SerializableComparableTesting(encoding.SerializableComparable):
    serializable_fields = ('jack', 'jill')

    def __init__(self, jack, jill):
        self.jack = jack
        self.jill = jill


class TestSerializable(base.ZocopTest):
    def test_baseclass_serialize(self):
        obj = encoding.Serializable()
        self.assertEqual({}, obj.serialize())

    def test_childclass_serialize(self):
        expected = {'jack': 'hello', 'jill': 'world'}
        obj = SerializableTesting('hello', 'world')
        self.assertEqual(expected, obj.serialize())

    def test_numpy_values(self):
        obj = SerializableTesting(np.array([1.5, 2.0]), np.int64(3))
        self.assertEqual({'jack': [1.5, 2.0], 'jill': 3}, obj.serialize())
        self.assertIsInstance(obj.serialize()['jill'], int)

    def test_nested(self):
        obj = SerializableTesting(SerializableTesting(1, (2, {3})), None)
        self.assertEqual({'jack': {'jack': 1, 'jill': [2, [3]]},
                          'jill': None}, obj.serialize())


class TestSerializableComparable(base.ZocopTest):

    def test_childclass_equal(self):
        obj1 = SerializableComparableTesting(np.array([1.0]), 'world')
        obj2 = SerializableComparableTesting(np.array([1.0]), 'world')
        self.assertEqual(obj1, obj2)

    def test_childclass_notequal(self):
        obj1 = SerializableComparableTesting('hello', 'world')
        obj2 = SerializableComparableTesting('hello', 'world2')
        self.assertNotEqual(obj1, obj2)

    def test_childclass_hash(self):
        # Ensure __hash__ is None
        obj = SerializableComparableTesting('hello', 'world')
        self.assertIsNone(obj.__hash__)


class TestKeyValueLines(base.ZocopTest):

    def test_format_value(self):
        self.assertEqual('true', encoding.format_value(True))
        self.assertEqual('unknown', encoding.format_value(None))
        self.assertEqual('0.1', encoding.format_value(0.1))
        self.assertEqual('inf', encoding.format_value(float('inf')))
        self.assertEqual('-inf', encoding.format_value(-float('inf')))
        self.assertEqual('3', encoding.format_value(np.int32(3)))
        self.assertEqual('1.0 -2.5', encoding.format_value(
            np.array([1.0, -2.5])))
        self.assertEqual('PStationary', encoding.format_value('PStationary'))

    def test_float_round_trips(self):
        value = 2.0 / 3
        self.assertEqual(value, float(encoding.format_value(value)))

    def test_flatten(self):
        mapping = {'status': 'MaxIters',
                   'residual': SerializableTesting(0.5, False),
                   'iterations': 4}
        self.assertEqual(['iterations=4',
                          'residual.jack=0.5',
                          'residual.jill=false',
                          'status=MaxIters'],
                         encoding.to_key_value_lines(mapping))

    def test_prefix(self):
        self.assertEqual(
            ['positive.jack=1', 'positive.jill=unknown'],
            encoding.to_key_value_lines(SerializableTesting(1, None),
                                        'positive.'))
