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

"""Outer loop: inexact augmented Lagrangian iterations with a Lyapunov
proximal term, parameter derivation and descent diagnostics.
"""

import collections
import math

import numpy as np
from oslo_config import cfg
from oslo_log import log

from zocop import balm
from zocop import config
from zocop import core
from zocop import encoding
from zocop import errors
from zocop import utils
from zocop import zeroone

CONF = cfg.CONF
LOG = log.getLogger(__name__)

TRACE_FIELDS = ('k', 'lyapunov_beta', 'merit', 'step_w', 'step_u', 'step_z',
                'feas', 'p_residual_max', 'epsilon_k', 'inner_iterations',
                'zero_one_loss', 'f_value')

# One row per outer iteration k >= 1. ``epsilon_k`` is the tolerance the
# k-th inner solve ran with and ``merit`` adds eta times its square.
IterationRecord = collections.namedtuple('IterationRecord', TRACE_FIELDS)

DescentCheck = collections.namedtuple(
    'DescentCheck', ['holds', 'worst_violation', 'first_violation_k',
                     'steps_vanished'])


class SolveStatus(object):
    P_STATIONARY = 'PStationary'
    MAX_ITERS = 'MaxIters'
    RANK_DEFICIENT = 'RankDeficient'
    DIVERGED = 'Diverged'


class SolveMode(object):
    CERTIFIED = 'certified'
    PRACTICAL = 'practical'


class IterateState(encoding.SerializableComparable):
    """One outer iterate (w, u, z, v)."""

    serializable_fields = ('w', 'u', 'z', 'v')

    def __init__(self, w, u, z, v):
        self.w = w
        self.u = u
        self.z = z
        self.v = v

    @classmethod
    def default(cls, problem):
        """w = 0, u = b, z = 0, v = 0; feasible by construction."""
        return cls(np.zeros(problem.p), np.array(problem.b),
                   np.zeros(problem.n), np.zeros(problem.p))


class OuterConfig(encoding.SerializableComparable):
    """Penalty, step and tolerance parameters of the outer loop.

    ``alpha`` is always 1 / rho and ``tau`` is mu / 4.
    """

    serializable_fields = ('mode', 'mu', 'rho', 'alpha', 'beta', 'eta',
                           'tau', 'c1', 'c2', 'epsilon0', 'epsilon_ratio',
                           'tol_outer', 'tol_feas', 'max_outer',
                           'strict_rank')

    def __init__(self, mu, rho, beta, eta, c1, c2, epsilon0, epsilon_ratio,
                 tol_outer=None, tol_feas=None, max_outer=None,
                 strict_rank=None, mode=SolveMode.CERTIFIED):
        self.mode = mode
        self.mu = float(mu)
        self.rho = float(rho)
        self.alpha = 1.0 / self.rho
        self.beta = float(beta)
        self.eta = float(eta)
        self.tau = self.mu / 4.0
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.epsilon0 = float(epsilon0)
        self.epsilon_ratio = float(epsilon_ratio)
        self.tol_outer = (CONF.solver.tol_outer if tol_outer is None
                          else float(tol_outer))
        self.tol_feas = (CONF.solver.tol_feas if tol_feas is None
                         else float(tol_feas))
        self.max_outer = (CONF.solver.max_outer if max_outer is None
                          else max_outer)
        self.strict_rank = (CONF.solver.strict_rank if strict_rank is None
                            else strict_rank)

    def validate(self):
        failures = utils.AccumulatedFailures('outer configuration')
        if self.mode not in config.MODES:
            failures.add('unknown mode %r', self.mode)
        failures.check_positive(
            {name: getattr(self, name)
             for name in ('mu', 'rho', 'eta', 'epsilon0', 'tol_outer',
                          'tol_feas')})
        failures.check_nonnegative({'beta': self.beta})
        if not 0 < self.epsilon_ratio < 1:
            failures.add('epsilon_ratio must lie in (0, 1), got %s',
                         self.epsilon_ratio)
        if int(self.max_outer) != self.max_outer or self.max_outer < 1:
            failures.add('max_outer must be a positive integer, got %s',
                         self.max_outer)
        failures.raise_if_needed()


class SolveReport(encoding.Serializable):
    """Outcome of :func:`ialm_solve`; ``outer`` is the configuration used."""

    serializable_fields = ('status', 'objective', 'zero_one_loss',
                           'iterations', 'inner_iterations', 'certificate')

    def __init__(self, final, status, trace, certificate, objective,
                 outer=None):
        self.final = final
        self.status = status
        self.trace = trace
        self.certificate = certificate
        self.objective = objective
        self.outer = outer

    @property
    def iterations(self):
        return len(self.trace)

    @property
    def inner_iterations(self):
        return sum(r.inner_iterations for r in self.trace)

    @property
    def zero_one_loss(self):
        return core.CopProblem.zero_one_loss(self.final.u)


def _ratio_from_eta(rho, gamma, eta):
    x = rho * gamma ** 2 * eta
    return math.sqrt((x - 4.0) / (x + 4.0))


def rho_lower_bound(spectral, l_f, mu):
    """The strict lower bound on rho in certified mode."""
    gamma = spectral.gamma
    c1 = (mu + l_f) / gamma
    c2 = mu / gamma
    return max(16.0 * (c1 ** 2 + c2 ** 2) / mu, 6.0 * l_f / gamma ** 2)


def derive_parameters(spectral, l_f, mu, safety=None, epsilon0=None,
                      strict_rank=None, **kwargs):
    """Certified parameters from the convergence analysis.

    rho is ``safety`` times its lower bound, eta twice its lower bound
    4 / (rho gamma^2) and epsilon_ratio the largest admissible decay
    factor for that eta.

    :param spectral: :class:`zocop.core.SpectralInfo` of A.
    :param l_f: Lipschitz constant of grad f.
    :param kwargs: tol_outer, tol_feas and max_outer for
        :class:`OuterConfig`.
    :raises: RankDeficiencyError when A is rank deficient in strict mode.
    :returns: an :class:`OuterConfig`. Without full row rank and outside
        strict mode the practical parameters are returned instead.
    """
    if not mu > 0:
        raise errors.InvalidInputError('mu must be positive, got %s' % mu)
    if safety is None:
        safety = CONF.solver.safety
    if epsilon0 is None:
        epsilon0 = CONF.solver.epsilon0
    if strict_rank is None:
        strict_rank = CONF.solver.strict_rank
    if not spectral.full_row_rank:
        if strict_rank:
            raise errors.RankDeficiencyError(spectral.gamma,
                                             spectral.rank_tolerance)
        LOG.warning('A is not full row rank, certified parameters do not '
                    'exist; falling back to practical mode with rho=%s',
                    CONF.solver.practical_rho)
        return practical_parameters(spectral, l_f, mu,
                                    CONF.solver.practical_rho,
                                    epsilon0=epsilon0,
                                    strict_rank=strict_rank, **kwargs)

    gamma = spectral.gamma
    c1 = (mu + l_f) / gamma
    c2 = mu / gamma
    rho = safety * rho_lower_bound(spectral, l_f, mu)
    eta = 8.0 / (rho * gamma ** 2)
    outer = OuterConfig(mu, rho, 8.0 * c2 ** 2 / rho, eta, c1, c2, epsilon0,
                        _ratio_from_eta(rho, gamma, eta),
                        strict_rank=strict_rank, mode=SolveMode.CERTIFIED,
                        **kwargs)
    LOG.info('Derived certified parameters rho=%(rho)s eta=%(eta)s '
             'epsilon_ratio=%(ratio)s',
             {'rho': outer.rho, 'eta': outer.eta,
              'ratio': outer.epsilon_ratio})
    return outer


def practical_parameters(spectral, l_f, mu, rho, eta=None, epsilon0=None,
                         strict_rank=None, **kwargs):
    """Parameters around a user chosen rho; no convergence certificate.

    With gamma > 0, eta defaults to 8 / (rho gamma^2) and epsilon_ratio
    follows from eta when that is possible. Otherwise eta is 1, the ratio
    0.5 and beta falls back to mu.
    """
    if not (mu > 0 and rho > 0):
        raise errors.InvalidInputError('mu and rho must be positive')
    if eta is not None and not eta > 0:
        raise errors.InvalidInputError('eta must be positive, got %s' % eta)
    if epsilon0 is None:
        epsilon0 = CONF.solver.epsilon0
    gamma = spectral.gamma
    if gamma > 0:
        c1 = (mu + l_f) / gamma
        c2 = mu / gamma
        beta = 8.0 * c2 ** 2 / rho
        if eta is None:
            eta = 8.0 / (rho * gamma ** 2)
        if rho * gamma ** 2 * eta > 4.0:
            ratio = _ratio_from_eta(rho, gamma, eta)
        else:
            ratio = 0.5
    else:
        c1 = c2 = math.inf
        beta = mu
        eta = 1.0 if eta is None else eta
        ratio = 0.5
    LOG.warning('Practical mode with rho=%s: descent checks are '
                'advisory only', rho)
    return OuterConfig(mu, rho, beta, eta, c1, c2, epsilon0, ratio,
                       strict_rank=strict_rank, mode=SolveMode.PRACTICAL,
                       **kwargs)


def validate_overrides(outer, spectral, l_f, rho=None, eta=None):
    """Apply user overrides of rho and eta to a parameter set.

    In certified mode every override must respect the strict lower
    bounds, all problems being reported at once.

    :raises: ConfigValidationError listing every violated bound.
    :returns: a new :class:`OuterConfig`, or ``outer`` itself when there
        is nothing to override.
    """
    if rho is None and eta is None:
        return outer
    new_rho = outer.rho if rho is None else float(rho)
    failures = utils.AccumulatedFailures('parameter overrides')
    if not new_rho > 0:
        failures.add('rho must be positive, got %s', new_rho)
    gamma = spectral.gamma
    certified = outer.mode == SolveMode.CERTIFIED
    if certified and rho is not None:
        bound = rho_lower_bound(spectral, l_f, outer.mu)
        if not new_rho > bound:
            failures.add('rho=%s does not exceed the certified lower bound '
                         '%s', new_rho, bound)
    if eta is None:
        new_eta = (8.0 / (new_rho * gamma ** 2) if gamma > 0 and new_rho > 0
                   else outer.eta)
    else:
        new_eta = float(eta)
        if certified and not new_eta > 4.0 / (new_rho * gamma ** 2):
            failures.add('eta=%s does not exceed the certified lower bound '
                         '%s', new_eta, 4.0 / (new_rho * gamma ** 2))
        elif not new_eta > 0:
            failures.add('eta must be positive, got %s', new_eta)
    failures.raise_if_needed()

    if gamma > 0 and new_rho * gamma ** 2 * new_eta > 4.0:
        ratio = _ratio_from_eta(new_rho, gamma, new_eta)
    else:
        ratio = outer.epsilon_ratio
    beta = 8.0 * outer.c2 ** 2 / new_rho if gamma > 0 else outer.beta
    return OuterConfig(outer.mu, new_rho, beta, new_eta, outer.c1, outer.c2,
                       outer.epsilon0, ratio, tol_outer=outer.tol_outer,
                       tol_feas=outer.tol_feas, max_outer=outer.max_outer,
                       strict_rank=outer.strict_rank, mode=outer.mode)


def multiplier_step(z, rho, residual):
    """z + rho * (Aw + b - u)."""
    return z + rho * residual


def lyapunov_value(problem, w, u, z, v, rho, penalty):
    """f(w) + lam |u_+|_0 + <z, r> + rho/2 |r|^2 + penalty/2 |w - v|^2
    with r = Aw + b - u.
    """
    return problem.lyapunov_value(w, u, z, v, rho, penalty)


def _is_stationary(certificate, outer):
    return (certificate.max_residual <= outer.tol_outer
            and certificate.r_feas <= outer.tol_feas)


def ialm_solve(problem, init, outer, inner, sink=None):
    """Run the inexact augmented Lagrangian method.

    Each outer step solves the Lyapunov subproblem with
    :func:`zocop.balm.balm_solve` to tolerance epsilon_k, updates the
    multiplier, moves the proximal center to the new w and shrinks
    epsilon by ``outer.epsilon_ratio``.

    :param init: starting :class:`IterateState`.
    :param outer: an :class:`OuterConfig`.
    :param inner: a :class:`zocop.balm.InnerConfig`.
    :param sink: optional callable receiving each ``IterationRecord`` and
        the :class:`IterateState` reached.
    :raises: RankDeficiencyError if A is rank deficient and
        ``outer.strict_rank`` is set.
    :returns: a :class:`SolveReport`.
    """
    outer.validate()
    inner.validate()
    spectral = core.spectral_info(problem.A)
    if not spectral.full_row_rank:
        if outer.strict_rank:
            raise errors.RankDeficiencyError(spectral.gamma,
                                             spectral.rank_tolerance)
        LOG.warning('A is not full row rank; the run is not covered by '
                    'the convergence guarantees')

    w, u, z, v = problem.check_point(init.w, init.u, init.z, init.v)
    alpha = outer.alpha
    trace = []
    certificate = zeroone.p_residual(problem, w, u, z, alpha)
    if _is_stationary(certificate, outer):
        LOG.info('Initial point is already P-stationary')
        return SolveReport(IterateState(w, u, z, v),
                           SolveStatus.P_STATIONARY, trace, certificate,
                           problem.objective_value(w, u), outer)

    LOG.info('Starting solve: n=%(n)d p=%(p)d lambda=%(lam)s rho=%(rho)s '
             'mu=%(mu)s variant=%(variant)s mode=%(mode)s',
             {'n': problem.n, 'p': problem.p, 'lam': problem.lam,
              'rho': outer.rho, 'mu': outer.mu, 'variant': inner.variant,
              'mode': outer.mode})
    status = SolveStatus.MAX_ITERS
    epsilon = outer.epsilon0
    for k in range(1, outer.max_outer + 1):
        try:
            result = balm.balm_solve(problem, w, u, z, v, outer.mu,
                                     outer.rho, epsilon, inner)
        except errors.DivergenceError as e:
            LOG.error('Outer iteration %(k)d diverged: %(err)s',
                      {'k': k, 'err': e})
            status = SolveStatus.DIVERGED
            break
        if result.terminated_by == balm.InnerTermination.MAX_ITERS:
            LOG.warning('Inner solve of outer iteration %(k)d hit the '
                        'iteration limit', {'k': k})

        w_new, u_new = result.w, result.u
        residual = problem.residual(w_new, u_new)
        feas = float(np.linalg.norm(residual))
        z_new = multiplier_step(z, outer.rho, residual)
        lyapunov_beta = lyapunov_value(problem, w_new, u_new, z_new, v,
                                       outer.rho, outer.beta)
        certificate = zeroone.p_residual(problem, w_new, u_new, z_new,
                                         alpha)
        record = IterationRecord(
            k=k,
            lyapunov_beta=lyapunov_beta,
            merit=lyapunov_beta + outer.eta * epsilon ** 2,
            step_w=float(np.linalg.norm(w_new - w)),
            step_u=float(np.linalg.norm(u_new - u)),
            # |z_new - z| = rho |r| by the multiplier update
            step_z=outer.rho * feas,
            feas=feas,
            p_residual_max=certificate.max_residual,
            epsilon_k=epsilon,
            inner_iterations=result.iterations,
            zero_one_loss=problem.zero_one_loss(u_new),
            f_value=problem.objective.value(w_new))
        trace.append(record)
        w, u, z, v = w_new, u_new, z_new, w_new.copy()
        LOG.debug('Outer %(k)d: merit=%(merit)s feas=%(feas)s '
                  'residual=%(res)s inner=%(inner)d',
                  {'k': k, 'merit': record.merit, 'feas': feas,
                   'res': record.p_residual_max,
                   'inner': result.iterations})
        if sink is not None:
            sink(record, IterateState(w, u, z, v))

        if not math.isfinite(record.merit):
            status = SolveStatus.DIVERGED
            break
        if _is_stationary(certificate, outer):
            status = SolveStatus.P_STATIONARY
            break
        epsilon = epsilon * outer.epsilon_ratio

    if status == SolveStatus.MAX_ITERS and not spectral.full_row_rank:
        status = SolveStatus.RANK_DEFICIENT
    certificate = zeroone.p_residual(problem, w, u, z, alpha)
    LOG.info('Solve finished with status %(status)s after %(k)d outer '
             'iterations, residual %(res)s',
             {'status': status, 'k': len(trace),
              'res': certificate.max_residual})
    return SolveReport(IterateState(w, u, z, v), status, trace, certificate,
                       problem.objective_value(w, u), outer)


def verify_descent_trace(trace, tau, eta=None, slack=1e-9, tol=None):
    """Check the outer merit decrease on a finished trace.

    Consecutive rows must satisfy
    merit_k - merit_{k+1} >= tau |w^{k+1} - w^k|^2 - slack. When ``eta`` is
    given the merit is recomputed from lyapunov_beta and epsilon_k instead
    of taken from the rows. ``steps_vanished`` tells whether the last
    steps in w, u and z are all within 10 * tol.

    :raises: InvalidInputError for fewer than two rows.
    :returns: a ``DescentCheck`` named tuple; ``first_violation_k`` is the
        k of the earlier row of the first violating pair.
    """
    if len(trace) < 2:
        raise errors.InvalidInputError(
            'a descent check needs at least two trace rows')
    if tol is None:
        tol = CONF.solver.tol_outer
    if eta is None:
        merits = [r.merit for r in trace]
    else:
        merits = [r.lyapunov_beta + eta * r.epsilon_k ** 2 for r in trace]

    worst = 0.0
    first = None
    for i in range(len(trace) - 1):
        shortfall = (tau * trace[i + 1].step_w ** 2 - slack
                     - (merits[i] - merits[i + 1]))
        if shortfall > 0:
            worst = max(worst, shortfall)
            if first is None:
                first = trace[i].k
    last = trace[-1]
    vanished = max(last.step_w, last.step_u, last.step_z) <= 10.0 * tol
    return DescentCheck(first is None, worst, first, vanished)


def solve_problem(problem, mu=None, variant=None, mode=None, rho=None,
                  eta=None, epsilon0=None, t=None, init=None, safety=None,
                  max_inner=None, strict_rank=None, sink=None, **kwargs):
    """Derive every parameter for ``problem`` and run :func:`ialm_solve`.

    Arguments left as None come from the ``[solver]`` and ``[inner]``
    configuration groups. ``epsilon0`` is scaled by 1 + |grad f(w0)|.

    :param kwargs: tol_outer, tol_feas and max_outer.
    :returns: a :class:`SolveReport`.
    """
    mu = CONF.solver.mu if mu is None else mu
    variant = CONF.solver.variant if variant is None else variant
    mode = CONF.solver.mode if mode is None else mode
    epsilon0 = CONF.solver.epsilon0 if epsilon0 is None else epsilon0
    if init is None:
        init = IterateState.default(problem)
    if mode not in config.MODES:
        raise errors.ConfigValidationError('unknown mode %r' % mode)

    spectral = core.spectral_info(problem.A)
    objective = problem.objective
    l_f = objective.lipschitz_l_f
    w0 = utils.as_vector(init.w, 'w', problem.p)
    epsilon0 = epsilon0 * (1.0 + float(np.linalg.norm(
        objective.gradient(w0))))

    outer = None
    if mode == SolveMode.CERTIFIED:
        outer = derive_parameters(spectral, l_f, mu, safety=safety,
                                  epsilon0=epsilon0, strict_rank=strict_rank,
                                  **kwargs)
        if outer.mode == SolveMode.CERTIFIED:
            outer = validate_overrides(outer, spectral, l_f, rho=rho,
                                       eta=eta)
        elif rho is not None or eta is not None:
            # rank deficient A: the overrides apply to the fallback
            outer = None
    if outer is None:
        outer = practical_parameters(
            spectral, l_f, mu,
            CONF.solver.practical_rho if rho is None else rho, eta=eta,
            epsilon0=epsilon0, strict_rank=strict_rank, **kwargs)

    sigma_f = objective.strong_convexity_sigma_f
    inner = balm.default_inner_config(variant, spectral, outer.mu,
                                      outer.rho, l_f, safety=safety,
                                      sigma_f=sigma_f)
    inner = inner.with_overrides(t=t, max_inner_iters=max_inner)
    return ialm_solve(problem, init, outer, inner, sink=sink)
