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

from oslo_config import cfg

CONF = cfg.CONF

VARIANTS = ('CaseI', 'CaseII')
MODES = ('certified', 'practical')

solver_opts = [
    cfg.FloatOpt('mu',
                 default=1.0,
                 min=0.0,
                 help='Proximal weight of the Lyapunov term. Must be '
                      'strictly positive.'),
    cfg.FloatOpt('safety',
                 default=1.01,
                 min=1.0,
                 help='Multiplicative margin applied to the derived lower '
                      'bounds on the penalty and step parameters.'),
    cfg.FloatOpt('epsilon0',
                 default=1.0,
                 help='Base inner tolerance. The first tolerance is this '
                      'value times (1 + |grad f(w0)|).'),
    cfg.FloatOpt('tol_outer',
                 default=1e-6,
                 help='Outer termination tolerance on the P-stationarity '
                      'residual.'),
    cfg.FloatOpt('tol_feas',
                 default=1e-6,
                 help='Outer termination tolerance on |Aw + b - u|.'),
    cfg.IntOpt('max_outer',
               default=500,
               min=1,
               help='Maximum number of outer iterations.'),
    cfg.BoolOpt('strict_rank',
                default=False,
                help='Fail instead of warning when A is not full row '
                     'rank.'),
    cfg.StrOpt('mode',
               default='certified',
               choices=MODES,
               help='certified derives every parameter from the '
                    'convergence bounds; practical accepts a user chosen '
                    'penalty and treats descent checks as advisory.'),
    cfg.FloatOpt('practical_rho',
                 default=1.0,
                 help='Penalty used in practical mode when none is given.'),
    cfg.StrOpt('variant',
               default='CaseI',
               choices=VARIANTS,
               help='w-step variant: CaseI linearizes f, CaseII solves the '
                    'quadratic system exactly.'),
    cfg.FloatOpt('rank_tolerance_factor',
                 default=1e-10,
                 help='Rank tolerance relative to |A|^2.'),
]

inner_opts = [
    cfg.IntOpt('max_inner_iters',
               default=10000,
               min=1,
               help='Maximum number of inner iterations per outer step.'),
    cfg.FloatOpt('descent_tolerance',
                 default=1e-10,
                 help='Absolute slack of the inner descent test.'),
    cfg.FloatOpt('epsilon_floor',
                 default=1e-8,
                 help='Lower bound on the Bregman coefficient t.'),
    cfg.FloatOpt('exact_start_tolerance',
                 default=1e-12,
                 help='An inner solve returns without iterating only when '
                      'its start is stationary to within this value.'),
    cfg.IntOpt('direct_max_dim',
               default=2000,
               help='Largest dimension for which the CaseII system is '
                    'always factorized directly.'),
    cfg.FloatOpt('woodbury_max_fraction',
                 default=0.25,
                 help='Above direct_max_dim, use the low-rank update when '
                      '|T| is below this fraction of p.'),
]

run_opts = [
    cfg.StrOpt('trace',
               help='Write the outer iteration trace as CSV to this '
                    'path.'),
    cfg.IntOpt('seed',
               default=0,
               help='Seed for synthetic data and oracle sampling.'),
    cfg.IntOpt('jobs',
               default=1,
               min=1,
               help='Number of labels trained concurrently by mlc.'),
    cfg.FloatOpt('xi',
                 default=1e-3,
                 help='Ranking gap used by mrc.'),
]


def register_opts(conf):
    conf.register_opts(solver_opts, group='solver')
    conf.register_opts(inner_opts, group='inner')
    conf.register_opts(run_opts)


register_opts(CONF)


def list_opts():
    return [('DEFAULT', run_opts),
            ('solver', solver_opts),
            ('inner', inner_opts)]
