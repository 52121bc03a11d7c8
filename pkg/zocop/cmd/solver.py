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

import sys

from oslo_config import cfg
from oslo_log import log

from zocop import commands
from zocop import config
from zocop import errors

CONF = cfg.CONF
LOG = log.getLogger(__name__)

EXIT_VALIDATION = errors.ValidationError.exit_code


# Sub-command destinations named like a [DEFAULT] option clash with it
# inside oslo.config, hence the cmd_ prefix.
def _add_solver_arguments(parser):
    parser.add_argument('--mu', type=float)
    parser.add_argument('--mode', choices=config.MODES)
    parser.add_argument('--variant', choices=config.VARIANTS)
    parser.add_argument('--rho', type=float,
                        help='Penalty override. Certified mode rejects '
                             'values not above the derived lower bound.')
    parser.add_argument('--eta', type=float)
    parser.add_argument('--epsilon0', type=float)
    parser.add_argument('--t', type=float,
                        help='Bregman coefficient of the inner solver.')
    parser.add_argument('--tol-outer', type=float)
    parser.add_argument('--tol-feas', type=float)
    parser.add_argument('--max-outer', type=int)
    parser.add_argument('--max-inner', type=int)
    parser.add_argument('--strict-rank', action='store_true', default=None)
    parser.add_argument('--trace', dest='cmd_trace',
                        help='Write the outer iteration trace here.')
    parser.add_argument('--seed', dest='cmd_seed', type=int)


def add_command_parsers(subparsers):
    parser = subparsers.add_parser(
        'solve', help='Solve a quadratic problem from a key = value file.')
    parser.add_argument('--problem')
    _add_solver_arguments(parser)

    parser = subparsers.add_parser(
        'svm', help='Train a 0/1 loss SVM on a LIBSVM file.')
    parser.add_argument('--data')
    parser.add_argument('--lambda', dest='lam', type=float)
    _add_solver_arguments(parser)

    parser = subparsers.add_parser(
        'tsvm', help='Train a twin SVM on a LIBSVM file.')
    parser.add_argument('--data')
    for index in range(1, 5):
        parser.add_argument('--lambda%d' % index, dest='lam%d' % index,
                            type=float)
    _add_solver_arguments(parser)

    parser = subparsers.add_parser(
        'mlc', help='Train one SVM per label of a multi-label LIBSVM file.')
    parser.add_argument('--data')
    parser.add_argument('--lambda', dest='lam', type=float)
    parser.add_argument('--jobs', dest='cmd_jobs', type=int)
    _add_solver_arguments(parser)

    parser = subparsers.add_parser(
        'mrc', help='Maximum rank correlation regression on a CSV file.')
    parser.add_argument('--data')
    parser.add_argument('--lambda1', dest='lam1', type=float)
    parser.add_argument('--lambda2', dest='lam2', type=float)
    parser.add_argument('--xi', dest='cmd_xi', type=float)
    _add_solver_arguments(parser)

    parser = subparsers.add_parser(
        'diagnose', help='Check the merit decrease of a trace file.')
    parser.add_argument('--trace', dest='cmd_trace')
    parser.add_argument('--mu', type=float)
    parser.add_argument('--tol-outer', type=float)

    parser = subparsers.add_parser(
        'oracle-check',
        help='Compare a solve with the enumerated stationary points.')
    parser.add_argument('--problem')
    parser.add_argument('--alpha', type=float)
    _add_solver_arguments(parser)


command_opt = cfg.SubCommandOpt('command',
                                title='Commands',
                                help='Available commands',
                                handler=add_command_parsers)
CONF.register_cli_opt(command_opt)
log.register_options(CONF)


def run_cli(argv, out=None, err=None, default_config_files=None):
    """Parse argv, run the sub-command and return the exit code.

    :param argv: arguments without the program name.
    :param out: stream for the key=value summary, stdout by default.
    :param err: stream for error messages, stderr by default.
    :param default_config_files: configuration files read when no
        --config-file is given; the oslo.config search path by default.
    """
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        CONF(args=argv, project='zocop',
             default_config_files=default_config_files)
    except SystemExit as e:
        # argparse already printed the usage
        return EXIT_VALIDATION if e.code else 0
    except cfg.Error as e:
        err.write('%s\n' % e)
        return EXIT_VALIDATION
    log.setup(CONF, 'zocop')

    try:
        run_config = commands.RunConfig.from_conf(CONF)
        run_config.validate()
        runner = commands.get_runner(run_config.task)
        return runner(run_config, out)
    except errors.ZocopError as e:
        LOG.debug('Command failed: %r', e)
        err.write('%s\n' % e)
        return e.exit_code
    except cfg.Error as e:
        err.write('%s\n' % e)
        return EXIT_VALIDATION


def run():
    """Entrypoint for the zocop command."""
    sys.exit(run_cli(sys.argv[1:]))
