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

"""Sub-command runners of the zocop CLI.

Runners are registered as entry points in the ``zocop.commands``
namespace. Each one takes a validated :class:`RunConfig` and an output
stream, writes flat ``key=value`` lines and returns the exit code.
"""

import os

import numpy as np
from oslo_log import log
from stevedore import driver
from stevedore import exception as stevedore_exc

from zocop import apps
from zocop import config
from zocop import encoding
from zocop import errors
from zocop import ialm
from zocop import oracle
from zocop import readers
from zocop import utils
from zocop import zeroone

LOG = log.getLogger(__name__)

_NAMESPACE = 'zocop.commands'

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NOT_CONVERGED = 2

_STATUS_EXIT_CODES = {
    ialm.SolveStatus.P_STATIONARY: EXIT_OK,
    ialm.SolveStatus.MAX_ITERS: EXIT_NOT_CONVERGED,
    ialm.SolveStatus.RANK_DEFICIENT: EXIT_NOT_CONVERGED,
    ialm.SolveStatus.DIVERGED: EXIT_FAILED,
}

COMMANDS = ('solve', 'svm', 'tsvm', 'mlc', 'mrc', 'diagnose',
            'oracle-check')

_REQUIRED = {
    'solve': ('problem_path',),
    'svm': ('data_path', 'lambda'),
    'mlc': ('data_path', 'lambda'),
    'mrc': ('data_path', 'lambda1', 'lambda2'),
    'tsvm': ('data_path', 'lambda1', 'lambda2', 'lambda3', 'lambda4'),
    'diagnose': ('trace_path',),
    'oracle-check': ('problem_path', 'alpha'),
}

LAMBDA_NAMES = ('lambda', 'lambda1', 'lambda2', 'lambda3', 'lambda4')

# Overridable solver parameters; None keeps the derived value.
OVERRIDES = ('rho', 'eta', 'epsilon0', 't')


class RunConfig(encoding.Serializable):
    """Everything one CLI invocation needs, independent of oslo.config."""

    serializable_fields = ('task', 'data_path', 'problem_path',
                           'trace_path', 'lambdas', 'mu', 'overrides',
                           'tol_outer', 'tol_feas', 'max_outer',
                           'max_inner', 'seed', 'strict_rank', 'mode',
                           'variant', 'jobs', 'xi', 'alpha', 'safety')

    def __init__(self, task, data_path=None, problem_path=None,
                 trace_path=None, lambdas=None, mu=1.0, overrides=None,
                 tol_outer=1e-6, tol_feas=1e-6, max_outer=500,
                 max_inner=10000, seed=0, strict_rank=False,
                 mode='certified', variant='CaseI', jobs=1, xi=1e-3,
                 alpha=None, safety=1.01):
        self.task = task
        self.data_path = data_path
        self.problem_path = problem_path
        self.trace_path = trace_path
        self.lambdas = dict((name, None) for name in LAMBDA_NAMES)
        self.lambdas.update(lambdas or {})
        self.mu = mu
        self.overrides = dict((name, None) for name in OVERRIDES)
        self.overrides.update(overrides or {})
        self.tol_outer = tol_outer
        self.tol_feas = tol_feas
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.seed = seed
        self.strict_rank = strict_rank
        self.mode = mode
        self.variant = variant
        self.jobs = jobs
        self.xi = xi
        self.alpha = alpha
        self.safety = safety

    @classmethod
    def from_conf(cls, conf):
        """Build a RunConfig from parsed options.

        Sub-command flags win over the ``[DEFAULT]``, ``[solver]`` and
        ``[inner]`` values, which come from configuration files.
        """
        command = conf.command

        def pick(name, default=None):
            value = getattr(command, name, None)
            return default if value is None else value

        return cls(
            command.name,
            data_path=pick('data'),
            problem_path=pick('problem'),
            trace_path=pick('cmd_trace', conf.trace),
            lambdas=dict((name, pick(name.replace('lambda', 'lam')))
                         for name in LAMBDA_NAMES),
            mu=pick('mu', conf.solver.mu),
            overrides=dict((name, pick(name)) for name in OVERRIDES),
            tol_outer=pick('tol_outer', conf.solver.tol_outer),
            tol_feas=pick('tol_feas', conf.solver.tol_feas),
            max_outer=pick('max_outer', conf.solver.max_outer),
            max_inner=pick('max_inner', conf.inner.max_inner_iters),
            seed=pick('cmd_seed', conf.seed),
            strict_rank=pick('strict_rank', conf.solver.strict_rank),
            mode=pick('mode', conf.solver.mode),
            variant=pick('variant', conf.solver.variant),
            jobs=pick('cmd_jobs', conf.jobs),
            xi=pick('cmd_xi', conf.xi),
            alpha=pick('alpha'),
            safety=conf.solver.safety)

    def validate(self):
        """Check the whole configuration, reporting every problem at once.

        :raises: ConfigValidationError
        """
        failures = utils.AccumulatedFailures('run configuration')
        if self.task not in COMMANDS:
            failures.add('unknown command %r', self.task)
        values = dict(self.lambdas, data_path=self.data_path,
                      problem_path=self.problem_path,
                      trace_path=self.trace_path, alpha=self.alpha)
        for name in _REQUIRED.get(self.task, ()):
            if values[name] is None:
                failures.add('%s requires %s', self.task, name)

        # lambda1 and lambda3 weigh quadratic terms and may be 0
        nonnegative = dict(lambda1=self.lambdas['lambda1'],
                           lambda3=self.lambdas['lambda3'],
                           t=self.overrides['t'])
        positive = {'lambda': self.lambdas['lambda'],
                    'lambda2': self.lambdas['lambda2'],
                    'lambda4': self.lambdas['lambda4'],
                    'mu': self.mu, 'tol_outer': self.tol_outer,
                    'tol_feas': self.tol_feas, 'xi': self.xi,
                    'alpha': self.alpha}
        for name in ('rho', 'eta', 'epsilon0'):
            positive[name] = self.overrides[name]
        failures.check_positive(positive)
        failures.check_nonnegative(nonnegative)
        for name in ('max_outer', 'max_inner', 'jobs'):
            if getattr(self, name) < 1:
                failures.add('%s must be at least 1, got %s', name,
                             getattr(self, name))
        if self.mode not in config.MODES:
            failures.add('mode must be one of %s, got %r',
                         ', '.join(config.MODES), self.mode)
        if self.variant not in config.VARIANTS:
            failures.add('variant must be one of %s, got %r',
                         ', '.join(config.VARIANTS), self.variant)
        failures.raise_if_needed()

    def solve_kwargs(self):
        """Keyword arguments for :func:`zocop.ialm.solve_problem`."""
        kwargs = dict(self.overrides)
        kwargs.update(mu=self.mu, variant=self.variant, mode=self.mode,
                      max_inner=self.max_inner, safety=self.safety,
                      strict_rank=self.strict_rank,
                      tol_outer=self.tol_outer, tol_feas=self.tol_feas,
                      max_outer=self.max_outer)
        return kwargs


def get_runner(name):
    """Load the runner of a sub-command.

    :raises: UnknownCommandError if no runner is registered under name.
    """
    try:
        manager = driver.DriverManager(_NAMESPACE, name)
    except stevedore_exc.NoMatches:
        raise errors.UnknownCommandError(
            'no runner registered for %r' % name)
    LOG.debug('Loaded runner %(runner)s for %(name)s',
              {'runner': manager.driver, 'name': name})
    return manager.driver


def _emit(out, summary):
    for line in encoding.to_key_value_lines(summary):
        out.write(line + '\n')


def _trace_path(run_config, index=None):
    path = run_config.trace_path
    if path is None or index is None:
        return path
    root, ext = os.path.splitext(path)
    return '%s-%s%s' % (root, index, ext or '.csv')


def _summary(problem, report):
    outer = report.outer
    summary = report.serialize()
    summary['residual'] = summary.pop('certificate')
    certificate = zeroone.global_minimizer_certificate(
        problem, outer.alpha, outer.mu, outer.rho)
    summary.update(mode=outer.mode, rho=outer.rho, mu=outer.mu,
                   global_certificate=certificate.lyapunov)
    return summary


def _combined_exit_code(reports):
    codes = [_STATUS_EXIT_CODES[report.status] for report in reports]
    if EXIT_FAILED in codes:
        return EXIT_FAILED
    return max(codes)


def _solve_and_report(problem, run_config, out, index=None, prefix=None):
    report = ialm.solve_problem(problem, **run_config.solve_kwargs())
    trace_path = _trace_path(run_config, index)
    if trace_path is not None:
        readers.write_trace(report.trace, trace_path)
    summary = _summary(problem, report)
    _emit(out, summary if prefix is None else {prefix: summary})
    return report


def run_solve(run_config, out):
    """Solve a quadratic problem read from a problem file."""
    problem = readers.read_problem_file(run_config.problem_path)
    report = _solve_and_report(problem, run_config, out)
    return _STATUS_EXIT_CODES[report.status]


def run_svm(run_config, out):
    data = readers.read_libsvm(run_config.data_path)
    problem = apps.build_svm(data, run_config.lambdas['lambda'])
    report = _solve_and_report(problem, run_config, out)
    evaluation = apps.evaluate(report.final.w, data, apps.Task.SVM)
    _emit(out, {'accuracy': evaluation.accuracy,
                'hamming_loss': evaluation.hamming_loss})
    return _STATUS_EXIT_CODES[report.status]


def run_tsvm(run_config, out):
    data = readers.read_libsvm(run_config.data_path)
    lambdas = run_config.lambdas
    problems = apps.build_tsvm(
        data.X[data.y > 0], data.X[data.y < 0],
        (lambdas['lambda1'], lambdas['lambda2'], lambdas['lambda3'],
         lambdas['lambda4']))
    reports = [_solve_and_report(problem, run_config, out, index, prefix)
               for index, (problem, prefix)
               in enumerate(zip(problems, ('positive', 'negative')))]
    predictions = apps.predict_twin(reports[0].final.w, reports[1].final.w,
                                    data.X)
    _emit(out, {'accuracy': float(np.mean(predictions == data.y))})
    return _combined_exit_code(reports)


def run_mlc(run_config, out):
    data = readers.read_libsvm_multilabel(run_config.data_path)
    reports = apps.train_mlc(data, run_config.lambdas['lambda'],
                             jobs=run_config.jobs,
                             **run_config.solve_kwargs())
    problems = apps.build_mlc(data, run_config.lambdas['lambda'])
    for label, (problem, report) in enumerate(zip(problems, reports)):
        trace_path = _trace_path(run_config, label)
        if trace_path is not None:
            readers.write_trace(report.trace, trace_path)
        _emit(out, {'label%d' % label: _summary(problem, report)})
    W = np.column_stack([report.final.w for report in reports])
    evaluation = apps.evaluate(W, data, apps.Task.MLC)
    _emit(out, evaluation._asdict())
    return _combined_exit_code(reports)


def run_mrc(run_config, out):
    data = readers.read_csv_regression(run_config.data_path)
    problem = apps.build_mrc(data.X, data.y, run_config.lambdas['lambda1'],
                             run_config.lambdas['lambda2'], run_config.xi)
    report = _solve_and_report(problem, run_config, out)
    return _STATUS_EXIT_CODES[report.status]


def run_diagnose(run_config, out):
    """Check the outer merit decrease of a stored trace."""
    trace = readers.read_trace(run_config.trace_path)
    check = ialm.verify_descent_trace(trace, run_config.mu / 4.0,
                                      tol=run_config.tol_outer)
    summary = check._asdict()
    summary['rows'] = len(trace)
    _emit(out, summary)
    return EXIT_OK if check.holds else EXIT_FAILED


def run_oracle_check(run_config, out):
    """Compare the solver with the enumerated stationary points.

    The solver runs with rho = 1 / alpha so both sides use the same step.
    """
    problem = readers.read_problem_file(run_config.problem_path)
    alpha = run_config.alpha
    candidates = oracle.enumerate_stationary(problem, alpha)
    kwargs = run_config.solve_kwargs()
    kwargs['rho'] = 1.0 / alpha
    report = ialm.solve_problem(problem, **kwargs)
    final = report.final

    def distance(candidate):
        return max(np.max(np.abs(candidate.w - final.w)),
                   np.max(np.abs(candidate.u - final.u)),
                   np.max(np.abs(candidate.z - final.z)))

    summary = {'candidates': len(candidates), 'status': report.status,
               'objective': report.objective, 'matched': False,
               'distance': None, 'best_objective': None}
    if candidates:
        nearest = min(candidates, key=distance)
        summary.update(
            distance=float(distance(nearest)),
            best_objective=candidates[0].objective,
            matched=bool(distance(nearest) <= 1e-5 and
                         nearest.zero_one_loss == report.zero_one_loss))
    sigma_f = problem.objective.strong_convexity_sigma_f
    outer = report.outer
    summary['sigma_check'] = oracle.verify_sigma_constant(
        sigma_f, outer.rho, outer.mu, float(np.linalg.norm(problem.A, 2)),
        seed=run_config.seed).holds
    _emit(out, summary)
    if report.status != ialm.SolveStatus.P_STATIONARY:
        return _STATUS_EXIT_CODES[report.status]
    return EXIT_OK if summary['matched'] else EXIT_FAILED
