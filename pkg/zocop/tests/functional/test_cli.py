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

from zocop import apps
from zocop import readers
from zocop.tests.functional import base

_SCALAR_PROBLEM = ['H = 1', 'A = 1', 'b = -1', 'lambda = 10']
_SHIFTED_PROBLEM = ['H = 1', 'c = -2', 'd = 2', 'A = 1', 'b = -1',
                    'lambda = 0.4']


class TestCli(base.FunctionalBase):

    """Runs every sub-command on small generated inputs.

    The steps share the scratch directory: the diagnose step reads the
    trace written by the svm step.
    """

    def setUp(self):
        super(TestCli, self).setUp()
        data = apps.make_separable_dataset()
        self.X, self.y = data.X, data.y
        self.train = self.write_libsvm('toy.libsvm', self.X, self.y)

    def step_1_svm(self):
        output, _ = self.run_command('svm', '--data', self.train,
                                     '--lambda', '10',
                                     '--trace', self.path('svm.csv'))
        self.assertEqual('PStationary', output['status'])
        self.assertEqual('0', output['zero_one_loss'])
        self.assertEqual('1.0', output['accuracy'])
        self.assertEqual('certified', output['mode'])
        trace = readers.read_trace(self.path('svm.csv'))
        self.assertEqual(output['iterations'], str(len(trace)))

    def step_2_diagnose(self):
        # relies on the trace of step 1
        output, _ = self.run_command('diagnose',
                                     '--trace', self.path('svm.csv'))
        self.assertEqual('true', output['holds'])

    def step_3_tsvm(self):
        output, _ = self.run_command(
            'tsvm', '--data', self.train, '--lambda1', '0.1',
            '--lambda2', '10', '--lambda3', '0.1', '--lambda4', '10',
            '--mode', 'practical', '--max-outer', '20',
            '--trace', self.path('tsvm.csv'), expect_code=(0, 2))
        self.assertIn('positive.status', output)
        self.assertIn('negative.status', output)
        self.assertIn('accuracy', output)
        self.assertTrue(readers.read_trace(self.path('tsvm-0.csv')))
        self.assertTrue(readers.read_trace(self.path('tsvm-1.csv')))

    def step_4_mlc(self):
        Y = np.column_stack([self.y, -self.y])
        path = self.write_multilabel('toy.ml', self.X, Y)
        output, _ = self.run_command('mlc', '--data', path, '--lambda', '10',
                                     '--jobs', '2', expect_code=(0, 2))
        self.assertIn('label0.status', output)
        self.assertIn('label1.status', output)
        self.assertIn('hamming_loss', output)

    def step_5_mrc(self):
        X, y, _ = apps.make_monotone_dataset(n=10, seed=2)
        path = self.write('mono.csv', [','.join(repr(float(v)) for v in
                                                list(row) + [target])
                                       for row, target in zip(X, y)])
        output, _ = self.run_command('mrc', '--data', path,
                                     '--lambda1', '0.1', '--lambda2', '10',
                                     '--mode', 'practical', '--rho', '1',
                                     '--variant', 'CaseII')
        self.assertEqual('PStationary', output['status'])
        self.assertEqual('0', output['zero_one_loss'])

    def step_6_solve(self):
        path = self.write('scalar.txt', _SCALAR_PROBLEM)
        output, _ = self.run_command('solve', '--problem', path)
        self.assertEqual('PStationary', output['status'])
        self.assertEqual('0', output['iterations'])
        self.assertEqual('0.0', output['objective'])

    def step_7_oracle_check(self):
        path = self.write('shifted.txt', _SHIFTED_PROBLEM)
        output, _ = self.run_command('oracle-check', '--problem', path,
                                     '--alpha', '0.5',
                                     '--mode', 'practical')
        self.assertEqual('true', output['matched'])
        self.assertEqual('2', output['candidates'])

    def cli_steps(self):
        """Returns generator with test steps sorted by step number."""
        steps_unsorted = [step for step in dir(self)
                          if step.startswith('step_')]
        steps = sorted(steps_unsorted, key=lambda s: int(s.split('_', 2)[1]))
        for name in steps:
            yield getattr(self, name)

    def test_cli(self):
        for step in self.cli_steps():
            step()


class TestCliErrors(base.FunctionalBase):

    def test_unknown_flag(self):
        self.run_command('svm', '--bogus', expect_code=3)

    def test_unknown_command(self):
        self.run_command('train', expect_code=3)

    def test_missing_file(self):
        _, err = self.run_command('svm', '--data', self.path('missing'),
                                  '--lambda', '1', expect_code=4)
        self.assertIn('I/O error', err)

    def test_invalid_lambda(self):
        path = self.write('toy.libsvm', ['+1 1:1', '-1 1:-1'])
        _, err = self.run_command('svm', '--data', path, '--lambda', '-1',
                                  expect_code=3)
        self.assertIn('lambda must be positive', err)

    def test_missing_data(self):
        _, err = self.run_command('svm', '--lambda', '1', expect_code=3)
        self.assertIn('svm requires data_path', err)

    def test_malformed_dataset(self):
        path = self.write('bad.libsvm', ['+1 1:1', '-1 1:oops'])
        _, err = self.run_command('svm', '--data', path, '--lambda', '1',
                                  expect_code=3)
        self.assertIn('line 2', err)

    def test_strict_rank(self):
        path = self.write('deficient.txt', ['H = 1', 'A = 1; 1',
                                            'b = 1 1', 'lambda = 1'])
        _, err = self.run_command('solve', '--problem', path,
                                  '--strict-rank', expect_code=2)
        self.assertIn('rank deficient', err)

    def test_certified_rho_rejected(self):
        path = self.write('scalar.txt', _SCALAR_PROBLEM)
        _, err = self.run_command('solve', '--problem', path, '--rho', '1',
                                  expect_code=3)
        self.assertIn('certified lower bound', err)

    def test_diagnose_bad_trace(self):
        path = self.write('trace.csv', ['k,merit', '1,2'])
        self.run_command('diagnose', '--trace', path, expect_code=3)


class TestCliConfigFile(base.FunctionalBase):

    def test_solver_options_reach_the_solve(self):
        problem = self.write('scalar.txt', _SCALAR_PROBLEM)
        conf = self.write('zocop.conf', ['[solver]', 'practical_rho = 7.0',
                                         'max_outer = 50'])
        output, _ = self.run_command('--config-file', conf, 'solve',
                                     '--problem', problem,
                                     '--mode', 'practical',
                                     expect_code=(0, 2))
        self.assertEqual('practical', output['mode'])
        self.assertEqual('7.0', output['rho'])

    def test_flags_override_the_file(self):
        problem = self.write('scalar.txt', _SCALAR_PROBLEM)
        conf = self.write('zocop.conf', ['[solver]', 'mode = practical',
                                         'practical_rho = 7.0'])
        output, _ = self.run_command('--config-file', conf, 'solve',
                                     '--problem', problem, '--rho', '2',
                                     expect_code=(0, 2))
        self.assertEqual('practical', output['mode'])
        self.assertEqual('2.0', output['rho'])

    def test_rho_reaches_rank_deficient_fallback(self):
        problem = self.write('deficient.txt', ['H = 1', 'A = 1; 1',
                                               'b = 1 1', 'lambda = 1'])
        output, _ = self.run_command('solve', '--problem', problem,
                                     '--rho', '5', '--max-outer', '5',
                                     expect_code=(0, 2))
        self.assertEqual('practical', output['mode'])
        self.assertEqual('5.0', output['rho'])
