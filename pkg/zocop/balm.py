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

"""Inner solver: alternating prox u-steps and Bregman-linearized w-steps
on the Lyapunov function with the multiplier and proximal center fixed.
"""

import collections
import math

import numpy as np
from oslo_config import cfg
from oslo_log import log
from scipy import linalg

from zocop import config
from zocop import encoding
from zocop import errors
from zocop import utils
from zocop import zeroone

CONF = cfg.CONF
LOG = log.getLogger(__name__)


class InnerVariant(object):
    """How the w-step treats f and the penalty term."""

    CASE_I = 'CaseI'
    """Linearize f and the whole penalty; one gradient-like step."""

    CASE_II = 'CaseII'
    """Keep quadratic f and the zeroed rows exact; one linear solve."""


class InnerTermination(object):
    CRITERIA = 'Criteria'
    MAX_ITERS = 'MaxIters'


UStep = collections.namedtuple('UStep', ['u_next', 't_set', 's', 'branch'])

InnerCheck = collections.namedtuple(
    'InnerCheck', ['passed', 'crit_grad', 'crit_prox', 'descent_ok',
                   'lyapunov'])

# Row j describes the iterate after j steps: ``lyapunov`` is its working
# Lyapunov value, the steps and |T| refer to the move from j - 1 to j.
InnerTraceRow = collections.namedtuple(
    'InnerTraceRow', ['j', 'lyapunov', 'step_w', 'step_u', 't_set_size',
                      'crit_prox', 'crit_grad'])

InnerResult = collections.namedtuple(
    'InnerResult', ['w', 'u', 'iterations', 'trace', 'terminated_by',
                    'check', 'lyapunov_start'])


class InnerConfig(encoding.SerializableComparable):
    """Step parameters of the inner solver.

    ``q`` bounds the norm of the Bregman matrix and ``l_g`` is the
    Lipschitz constant of the linearized part. ``mu`` and ``sigma_f`` are
    kept so the variant's descent constant can be recomputed after an
    override of ``t``.
    """

    serializable_fields = ('variant', 't', 'q', 'l_g', 'zeta',
                           'descent_constant', 'max_inner_iters',
                           'descent_tolerance', 'exact_start_tolerance')

    def __init__(self, variant, t, q, l_g, mu, sigma_f=1.0,
                 max_inner_iters=None, descent_tolerance=None,
                 exact_start_tolerance=None):
        self.variant = variant
        self.t = float(t)
        self.q = float(q)
        self.l_g = float(l_g)
        self.mu = float(mu)
        self.sigma_f = float(sigma_f)
        self.max_inner_iters = (CONF.inner.max_inner_iters
                                if max_inner_iters is None
                                else max_inner_iters)
        self.descent_tolerance = (CONF.inner.descent_tolerance
                                  if descent_tolerance is None
                                  else float(descent_tolerance))
        self.exact_start_tolerance = (CONF.inner.exact_start_tolerance
                                      if exact_start_tolerance is None
                                      else float(exact_start_tolerance))

    @property
    def zeta(self):
        return self.t - self.q - self.l_g

    @property
    def descent_constant(self):
        """Guaranteed decrease per squared w-step for this variant."""
        if self.variant == InnerVariant.CASE_II:
            return (2.0 * self.t + self.mu + self.sigma_f - self.q) / 2.0
        return (2.0 * self.t + self.mu - self.l_g - self.q) / 2.0

    def with_overrides(self, t=None, max_inner_iters=None):
        """Return a copy with t and/or max_inner_iters replaced."""
        return InnerConfig(
            self.variant, self.t if t is None else t, self.q, self.l_g,
            self.mu, self.sigma_f,
            max_inner_iters=(self.max_inner_iters if max_inner_iters is None
                             else max_inner_iters),
            descent_tolerance=self.descent_tolerance,
            exact_start_tolerance=self.exact_start_tolerance)

    def validate(self):
        failures = utils.AccumulatedFailures('inner configuration')
        if self.variant not in config.VARIANTS:
            failures.add('unknown inner variant %r', self.variant)
        failures.check_nonnegative(
            {name: getattr(self, name)
             for name in ('t', 'q', 'l_g', 'descent_tolerance',
                          'exact_start_tolerance')})
        failures.check_positive({'mu': self.mu})
        if int(self.max_inner_iters) != self.max_inner_iters or \
                self.max_inner_iters < 1:
            failures.add('max_inner_iters must be a positive integer, '
                         'got %s', self.max_inner_iters)
        failures.raise_if_needed()


def default_inner_config(variant, spectral, mu, rho, l_f, safety=None,
                         sigma_f=1.0):
    """Smallest admissible Bregman coefficient times a safety margin.

    CaseI needs t > (l_f + rho |A|^2 - mu) / 2. CaseII needs
    t > (rho |A|^2 - mu - sigma_f) / 2, where sigma_f is the strong
    convexity modulus of the quadratic f (1 for 1/2 |w|^2). The bound is
    floored at ``[inner]epsilon_floor`` so that t stays positive.

    :param variant: an :class:`InnerVariant` value.
    :param spectral: :class:`zocop.core.SpectralInfo` of A.
    :param safety: margin >= 1, ``[solver]safety`` when omitted.
    :returns: an :class:`InnerConfig`.
    """
    if safety is None:
        safety = CONF.solver.safety
    if safety < 1:
        raise errors.InvalidInputError(
            'safety must be at least 1, got %s' % safety)
    q = rho * spectral.norm_A ** 2
    floor = CONF.inner.epsilon_floor
    if variant == InnerVariant.CASE_I:
        bound = (l_f + q - mu) / 2.0
        l_g = l_f
    elif variant == InnerVariant.CASE_II:
        bound = (q - mu - sigma_f) / 2.0
        l_g = 0.0
    else:
        raise errors.UnsupportedVariantError(
            'unknown inner variant %r' % variant)
    t = safety * max(floor, bound)
    return InnerConfig(variant, t, q, l_g, mu, sigma_f)


def u_step(problem, w, z_k, rho, s=None):
    """Exact prox step in u at alpha = 1 / rho.

    ``s = Aw + b + z_k / rho`` is returned with the result so the w-step
    can reuse it. ``t_set`` lists every component mapped to zero,
    including ties at the boundary.
    """
    if not rho > 0:
        raise errors.InvalidInputError('rho must be positive')
    if s is None:
        w, _, z_k, _ = problem.check_point(w=w, z=z_k)
        s = problem.A @ w + problem.b + z_k / rho
    result = zeroone.prox_zero_one(s, problem.lam, 1.0 / rho)
    t_set = np.flatnonzero(result.zeroed)
    return UStep(result.canonical, t_set, s, result.branch)


def w_step_case1(problem, w_prev, v_k, z_k, t_set, s, mu, rho, t):
    """Linearized w-step.

    w+ = (mu v + t w - grad f(w) - rho A_T' s_T) / (mu + t).
    """
    grad = problem.objective.gradient(w_prev)
    if len(t_set):
        grad = grad + rho * (problem.A[t_set].T @ s[t_set])
    denom = mu + t
    return (mu / denom) * v_k + (t / denom) * w_prev - grad / denom


class CaseTwoSystem(object):
    """Solver for (H + (t + mu) I + rho A_T' A_T) w = r.

    The factorization of H + (t + mu) I does not depend on T and is
    computed once per inner solve. Large systems with few zeroed rows go
    through a low-rank update in |T|-space instead of a fresh
    factorization.
    """

    def __init__(self, H, mu, t, direct_max_dim=None,
                 woodbury_max_fraction=None):
        self.p = H.shape[0]
        self._base = H + (t + mu) * np.eye(self.p)
        try:
            self._base_factor = linalg.cho_factor(self._base)
        except linalg.LinAlgError as e:
            raise errors.InternalSolverError(
                'H + (t + mu) I is not positive definite: %s' % e)
        self.direct_max_dim = (CONF.inner.direct_max_dim
                               if direct_max_dim is None
                               else direct_max_dim)
        self.woodbury_max_fraction = (CONF.inner.woodbury_max_fraction
                                      if woodbury_max_fraction is None
                                      else woodbury_max_fraction)

    def uses_low_rank(self, k):
        return (0 < k and self.p > self.direct_max_dim
                and k < self.woodbury_max_fraction * self.p)

    def solve(self, A_T, rhs, rho):
        k = A_T.shape[0]
        if k == 0:
            return linalg.cho_solve(self._base_factor, rhs)
        try:
            if self.uses_low_rank(k):
                base_rhs = linalg.cho_solve(self._base_factor, rhs)
                base_At = linalg.cho_solve(self._base_factor, A_T.T)
                capacitance = np.eye(k) / rho + A_T @ base_At
                return base_rhs - base_At @ linalg.solve(
                    capacitance, A_T @ base_rhs, assume_a='pos')
            factor = linalg.cho_factor(self._base + rho * (A_T.T @ A_T))
            return linalg.cho_solve(factor, rhs)
        except linalg.LinAlgError as e:
            raise errors.InternalSolverError(
                'CaseII system could not be solved: %s' % e)


def w_step_case2(problem, w_prev, v_k, z_k, t_set, mu, rho, t, system=None):
    """Exact w-step for quadratic f = 1/2 w'Hw + c'w + d.

    Solves (H + (t + mu) I + rho A_T' A_T) w
    = mu v + t w_prev - c - rho A_T' (b + z_k / rho)_T.

    :param system: a prepared :class:`CaseTwoSystem` for (H, mu, t).
    :raises: UnsupportedVariantError if f is not quadratic.
    """
    qf = problem.objective.quadratic_form
    if qf is None:
        raise errors.UnsupportedVariantError(
            'CaseII needs a quadratic objective')
    if system is None:
        system = CaseTwoSystem(qf.H, mu, t)
    rhs = mu * v_k + t * w_prev - qf.c
    A_T = problem.A[t_set]
    if len(t_set):
        rhs = rhs - rho * (A_T.T @ (problem.b[t_set] + z_k[t_set] / rho))
    return system.solve(A_T, rhs, rho)


def inner_stopping_check(problem, w, u, z_k, v_k, mu, rho, epsilon_k,
                         lyap_prev_outer, descent_tolerance=None):
    """Inexactness test of an inner iterate.

    The working Lyapunov value must not exceed the outer iterate's, and
    both the w-gradient and the prox residual in u must be within
    epsilon_k.

    :returns: an ``InnerCheck`` named tuple.
    """
    if descent_tolerance is None:
        descent_tolerance = CONF.inner.descent_tolerance
    alpha = 1.0 / rho
    scaled = z_k + rho * problem.residual(w, u)
    grad_w = (problem.objective.gradient(w) + mu * (w - v_k)
              + problem.A.T @ scaled)
    crit_grad = float(np.linalg.norm(grad_w))
    # grad_u = -scaled
    crit_prox = zeroone.prox_distance(u, u + alpha * scaled, problem.lam,
                                      alpha)
    lyapunov = problem.lyapunov_value(w, u, z_k, v_k, rho, mu)
    descent_ok = lyapunov <= lyap_prev_outer + descent_tolerance
    passed = descent_ok and max(crit_grad, crit_prox) <= epsilon_k
    return InnerCheck(passed, crit_grad, crit_prox, descent_ok, lyapunov)


def balm_solve(problem, w_start, u_start, z_k, v_k, mu, rho, epsilon_k,
               config):
    """Approximately minimize the Lyapunov function in (w, u).

    Starts at the outer iterate and alternates :func:`u_step` with the
    configured w-step until :func:`inner_stopping_check` passes or
    ``config.max_inner_iters`` steps were taken. The start itself is
    accepted only when it is stationary to within
    ``config.exact_start_tolerance``.

    :raises: DivergenceError if the Lyapunov value stops being finite.
    :returns: an ``InnerResult`` named tuple.
    """
    config.validate()
    if not (mu > 0 and rho > 0):
        raise errors.InvalidInputError('mu and rho must be positive')
    if not epsilon_k > 0:
        raise errors.InvalidInputError('epsilon_k must be positive')
    w, u, z_k, v_k = problem.check_point(w_start, u_start, z_k, v_k)

    system = None
    if config.variant == InnerVariant.CASE_II:
        qf = problem.objective.quadratic_form
        if qf is None:
            raise errors.UnsupportedVariantError(
                'CaseII needs a quadratic objective')
        system = CaseTwoSystem(qf.H, mu, config.t)

    lyap_start = problem.lyapunov_value(w, u, z_k, v_k, rho, mu)
    if not math.isfinite(lyap_start):
        raise errors.DivergenceError(
            'Lyapunov value at the inner start is %s' % lyap_start)
    check = inner_stopping_check(
        problem, w, u, z_k, v_k, mu, rho,
        min(epsilon_k, config.exact_start_tolerance), lyap_start,
        config.descent_tolerance)
    if check.passed:
        return InnerResult(w, u, 0, [], InnerTermination.CRITERIA, check,
                           lyap_start)

    trace = []
    for j in range(1, config.max_inner_iters + 1):
        s = problem.A @ w + problem.b + z_k / rho
        step = u_step(problem, w, z_k, rho, s=s)
        if config.variant == InnerVariant.CASE_I:
            w_next = w_step_case1(problem, w, v_k, z_k, step.t_set, s, mu,
                                  rho, config.t)
        else:
            w_next = w_step_case2(problem, w, v_k, z_k, step.t_set, mu,
                                  rho, config.t, system=system)
        u_next = step.u_next
        check = inner_stopping_check(problem, w_next, u_next, z_k, v_k,
                                     mu, rho, epsilon_k, lyap_start,
                                     config.descent_tolerance)
        if not math.isfinite(check.lyapunov):
            raise errors.DivergenceError(
                'Lyapunov value became %s at inner iteration %d'
                % (check.lyapunov, j))
        trace.append(InnerTraceRow(
            j, check.lyapunov, float(np.linalg.norm(w_next - w)),
            float(np.linalg.norm(u_next - u)), len(step.t_set),
            check.crit_prox, check.crit_grad))
        w, u = w_next, u_next
        if check.passed:
            LOG.debug('Inner solve met its criteria after %(j)d '
                      'iterations', {'j': j})
            return InnerResult(w, u, j, trace, InnerTermination.CRITERIA,
                               check, lyap_start)

    LOG.debug('Inner solve stopped after %(max)d iterations with '
              'crit_grad=%(g)s crit_prox=%(p)s',
              {'max': config.max_inner_iters, 'g': check.crit_grad,
               'p': check.crit_prox})
    return InnerResult(w, u, config.max_inner_iters, trace,
                       InnerTermination.MAX_ITERS, check, lyap_start)
