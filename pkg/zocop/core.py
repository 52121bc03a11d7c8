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

"""Problem representation and spectral quantities of the constraint matrix."""

import collections
import math

import numpy as np
from oslo_config import cfg
from oslo_log import log
from scipy import linalg

from zocop import config  # noqa
from zocop import encoding
from zocop import errors
from zocop import utils

CONF = cfg.CONF
LOG = log.getLogger(__name__)

QuadraticForm = collections.namedtuple('QuadraticForm', ['H', 'c', 'd'])


class SmoothObjective(encoding.Serializable):
    """Smooth part f of a 0/1 composite problem.

    ``value`` and ``gradient`` are callables on p-vectors. The Lipschitz
    constant of the gradient has to be supplied by the caller unless the
    objective is built with :meth:`quadratic`, which computes it.
    """

    serializable_fields = ('lipschitz_l_f', 'strong_convexity_sigma_f',
                           'is_quadratic')

    def __init__(self, value, gradient, lipschitz_l_f,
                 strong_convexity_sigma_f=0.0, quadratic_form=None):
        if not (math.isfinite(lipschitz_l_f) and lipschitz_l_f >= 0):
            raise errors.InvalidObjectiveError(
                'lipschitz_l_f must be a finite nonnegative number, got %s'
                % lipschitz_l_f)
        if not (math.isfinite(strong_convexity_sigma_f)
                and strong_convexity_sigma_f >= 0):
            raise errors.InvalidObjectiveError(
                'strong_convexity_sigma_f must be a finite nonnegative '
                'number, got %s' % strong_convexity_sigma_f)
        self.value = value
        self.gradient = gradient
        self.lipschitz_l_f = float(lipschitz_l_f)
        self.strong_convexity_sigma_f = float(strong_convexity_sigma_f)
        self.quadratic_form = quadratic_form

    @property
    def is_quadratic(self):
        return self.quadratic_form is not None

    @classmethod
    def quadratic(cls, H, c=None, d=0.0):
        """Build f(w) = 1/2 w'Hw + c'w + d.

        l_f is the spectral norm of H and sigma_f its smallest eigenvalue
        clamped at zero.

        :param H: symmetric p x p matrix.
        :param c: linear term, zero when omitted.
        :param d: constant term.
        :raises: InvalidObjectiveError if H is not symmetric.
        """
        H = utils.as_matrix(H, 'H')
        p = H.shape[0]
        if H.shape != (p, p):
            raise errors.DimensionMismatchError(
                'H must be square, got shape %s' % (H.shape,))
        if not np.allclose(H, H.T, rtol=1e-12, atol=1e-12):
            raise errors.InvalidObjectiveError('H must be symmetric')
        H = utils.readonly((H + H.T) / 2.0)
        c = utils.readonly(utils.as_vector(
            np.zeros(p) if c is None else c, 'c', p))
        d = float(d)

        eigenvalues = linalg.eigvalsh(H)
        l_f = float(np.max(np.abs(eigenvalues)))
        sigma_f = max(0.0, float(eigenvalues[0]))

        def value(w):
            return 0.5 * float(w @ (H @ w)) + float(c @ w) + d

        def gradient(w):
            return H @ w + c

        return cls(value, gradient, l_f, sigma_f,
                   quadratic_form=QuadraticForm(H, c, d))


class CopProblem(encoding.Serializable):
    """min f(w) + lam * |(Aw + b)_+|_0 written as a constrained problem.

    ``lam`` is the weight of the zero-one loss; ``lambda`` being a
    keyword, the attribute uses the short name.
    """

    serializable_fields = ('n', 'p', 'lam')

    def __init__(self, objective, A, b, lam):
        self.objective = objective
        self.A = utils.readonly(utils.as_matrix(A, 'A'))
        self.n, self.p = self.A.shape
        self.b = utils.readonly(utils.as_vector(b, 'b', self.n))
        if not (math.isfinite(lam) and lam > 0):
            raise errors.InvalidInputError(
                'lambda must be a positive finite number, got %s' % lam)
        self.lam = float(lam)
        qf = objective.quadratic_form
        if qf is not None and qf.H.shape != (self.p, self.p):
            raise errors.DimensionMismatchError(
                'H has shape %s but A has %d columns'
                % (qf.H.shape, self.p))

    def residual(self, w, u):
        """Return Aw + b - u."""
        return self.A @ w + self.b - u

    @staticmethod
    def zero_one_loss(u, tol=0.0):
        """Number of components of u above tol.

        Iterates produced by the proximal step are exact, so the objective
        counts strict positives. Margins Aw + b carry roundoff on rows that
        are feasible; count those with :func:`margin_loss`.
        """
        return int(np.count_nonzero(np.asarray(u) > tol))

    def objective_value(self, w, u):
        """f(w) + lam * |u_+|_0."""
        return self.objective.value(w) + self.lam * self.zero_one_loss(u)

    def lyapunov_value(self, w, u, z, v, rho, penalty):
        """Augmented Lagrangian plus penalty / 2 * |w - v|^2.

        With penalty 0 this is the augmented Lagrangian itself.
        """
        r = self.residual(w, u)
        d = w - v
        return (self.objective_value(w, u) + float(z @ r)
                + 0.5 * rho * float(r @ r) + 0.5 * penalty * float(d @ d))

    def check_point(self, w=None, u=None, z=None, v=None):
        """Validate iterate components against the problem dimensions.

        :raises: DimensionMismatchError or InvalidInputError.
        :returns: the converted arrays in argument order, None for missing.
        """
        return (None if w is None else utils.as_vector(w, 'w', self.p),
                None if u is None else utils.as_vector(u, 'u', self.n),
                None if z is None else utils.as_vector(z, 'z', self.n),
                None if v is None else utils.as_vector(v, 'v', self.p))


class SpectralInfo(encoding.SerializableComparable):
    """Largest singular value of A and the square root of the smallest
    eigenvalue of AA'.
    """

    serializable_fields = ('norm_A', 'gamma', 'full_row_rank',
                           'rank_tolerance')

    def __init__(self, norm_A, gamma, full_row_rank, rank_tolerance):
        self.norm_A = norm_A
        self.gamma = gamma
        self.full_row_rank = full_row_rank
        self.rank_tolerance = rank_tolerance


def spectral_info(A, rank_tolerance=None):
    """Compute |A| and gamma from the smaller Gram matrix.

    The rank tolerance applies to the smallest eigenvalue of AA', that is
    to gamma squared. When the eigenvalue does not exceed it, A is reported
    rank deficient and gamma is 0. With more rows than columns AA' is
    always singular.

    :param A: n x p matrix.
    :param rank_tolerance: tolerance compared with gamma squared (the
        smallest eigenvalue of AA'), not with gamma; defaults to
        ``[solver]rank_tolerance_factor`` times |A|^2.
    :returns: a :class:`SpectralInfo`.
    """
    A = utils.as_matrix(A, 'A')
    n, p = A.shape
    if n <= p:
        eigenvalues = linalg.eigvalsh(A @ A.T)
        theta_min = float(eigenvalues[0])
    else:
        eigenvalues = linalg.eigvalsh(A.T @ A)
        theta_min = 0.0
    theta_max = max(0.0, float(eigenvalues[-1]))
    norm_A = math.sqrt(theta_max)

    if rank_tolerance is None:
        rank_tolerance = CONF.solver.rank_tolerance_factor * theta_max

    # the tolerance bounds gamma squared, not gamma
    full_row_rank = theta_min > rank_tolerance
    gamma = math.sqrt(theta_min) if full_row_rank else 0.0
    if n > p:
        LOG.warning('A has more rows (%(n)d) than columns (%(p)d) and '
                    'cannot have full row rank', {'n': n, 'p': p})
    return SpectralInfo(norm_A, gamma, full_row_rank, rank_tolerance)


def margin_loss(margins, tol=None):
    """0/1 loss of margins Aw + b.

    A margin within tol of zero counts as satisfied. tol defaults to
    ``[solver]tol_feas``, the tolerance at which the solver accepts
    Aw + b = u, so a model reported with zero loss evaluates to zero.
    """
    if tol is None:
        tol = CONF.solver.tol_feas
    return CopProblem.zero_one_loss(margins, tol)


def check_gradient(obj, w, step=1e-6):
    """Compare the gradient with central finite differences.

    :param obj: a :class:`SmoothObjective`.
    :param w: evaluation point.
    :param step: finite-difference step.
    :raises: InvalidObjectiveError if value or gradient is not finite.
    :returns: the largest per-coordinate error, relative to
        max(1, |gradient_i|).
    """
    if not step > 0:
        raise errors.InvalidInputError('step must be positive')
    w = utils.as_vector(w, 'w')
    g = np.asarray(obj.gradient(w), dtype=float)
    if g.shape != w.shape or not np.all(np.isfinite(g)):
        raise errors.InvalidObjectiveError(
            'gradient is not a finite vector of length %d' % w.shape[0])
    if not math.isfinite(obj.value(w)):
        raise errors.InvalidObjectiveError('value is not finite at w')

    worst = 0.0
    shift = np.zeros_like(w)
    for i in range(w.shape[0]):
        shift[i] = step
        forward = obj.value(w + shift)
        backward = obj.value(w - shift)
        shift[i] = 0.0
        if not (math.isfinite(forward) and math.isfinite(backward)):
            raise errors.InvalidObjectiveError(
                'value is not finite near w along coordinate %d' % i)
        fd = (forward - backward) / (2.0 * step)
        worst = max(worst, abs(fd - g[i]) / max(1.0, abs(g[i])))
    return worst
