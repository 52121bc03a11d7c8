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

"""Proximal operator and stationarity tests for lam * |(.)_+|_0."""

import collections
import math

import numpy as np
from oslo_log import log

from zocop import encoding
from zocop import errors
from zocop import utils

LOG = log.getLogger(__name__)


class ProxBranch(object):
    """Which piece of the proximal map produced a component."""

    PASS_THROUGH = 'PassThrough'
    """Component kept as is: the center is negative or above threshold."""

    ZERO = 'Zero'
    """Center strictly between 0 and the threshold; mapped to 0."""

    TIE = 'Tie'
    """Center exactly 0 or exactly at the threshold; both values qualify."""


class ProxResult(encoding.SerializableComparable):
    """Componentwise output of the zero-one proximal map.

    ``canonical`` is the selected point, ``branch`` an object array of
    :class:`ProxBranch` values and ``tie_alternative`` holds the center
    value where the branch is a tie and NaN elsewhere.
    """

    serializable_fields = ('canonical', 'branch', 'threshold')

    def __init__(self, canonical, branch, tie_alternative, threshold):
        self.canonical = canonical
        self.branch = branch
        self.tie_alternative = tie_alternative
        self.threshold = threshold

    @property
    def zeroed(self):
        """Mask of components whose canonical value is 0 by the map."""
        return self.branch != ProxBranch.PASS_THROUGH

    @property
    def ties(self):
        return self.branch == ProxBranch.TIE


class AlphaThresholds(encoding.SerializableComparable):
    """Step sizes below which a stationary pair stays a prox fixed point."""

    serializable_fields = ('alpha_hat_u', 'alpha_hat_z', 'alpha_hat',
                           'alpha_star_u', 'alpha_star_z', 'alpha_star')

    def __init__(self, alpha_hat_u, alpha_hat_z, alpha_star_u,
                 alpha_star_z):
        self.alpha_hat_u = alpha_hat_u
        self.alpha_hat_z = alpha_hat_z
        self.alpha_hat = min(alpha_hat_u, alpha_hat_z)
        self.alpha_star_u = alpha_star_u
        self.alpha_star_z = alpha_star_z
        self.alpha_star = min(alpha_star_u, alpha_star_z)


class StationarityResidual(encoding.SerializableComparable):
    """Euclidean residuals of the P or P-tilde stationarity system."""

    serializable_fields = ('r_grad', 'r_prox', 'r_feas', 'r_multiplier',
                           'r_lyapunov_var', 'max_residual')

    def __init__(self, r_grad, r_prox, r_feas=0.0, r_multiplier=0.0,
                 r_lyapunov_var=0.0):
        self.r_grad = float(r_grad)
        self.r_prox = float(r_prox)
        self.r_feas = float(r_feas)
        self.r_multiplier = float(r_multiplier)
        self.r_lyapunov_var = float(r_lyapunov_var)
        self.max_residual = max(self.r_grad, self.r_prox, self.r_feas,
                                self.r_multiplier, self.r_lyapunov_var)


ExactPenaltyCheck = collections.namedtuple(
    'ExactPenaltyCheck', ['is_p_stationary', 'is_p_tilde_stationary_at_z',
                          'strongly_exact_back_map'])

GlobalCertificate = collections.namedtuple(
    'GlobalCertificate', ['original', 'lyapunov', 'sigma'])


def _check_weights(lam, alpha):
    if not (math.isfinite(lam) and lam > 0):
        raise errors.InvalidInputError(
            'lambda must be positive and finite, got %s' % lam)
    if not (math.isfinite(alpha) and alpha > 0):
        raise errors.InvalidInputError(
            'alpha must be positive and finite, got %s' % alpha)


def prox_zero_one(center, lam, alpha):
    """Proximal map of alpha * lam * |(.)_+|_0 at center.

    Componentwise, a center strictly inside (0, sqrt(2 lam alpha)) is sent
    to 0, a center equal to 0 or to the threshold is a tie resolved to 0,
    anything else passes through. Ties are detected by exact equality.

    :param center: n-vector.
    :param lam: weight of the zero-one loss.
    :param alpha: proximal step.
    :raises: InvalidInputError on non-finite input or weights.
    :returns: a :class:`ProxResult`.
    """
    _check_weights(lam, alpha)
    center = utils.as_vector(center, 'center')
    threshold = math.sqrt(2.0 * lam * alpha)

    inside = (center > 0) & (center < threshold)
    tie = (center == 0) | (center == threshold)

    canonical = np.where(inside | tie, 0.0, center)
    branch = np.full(center.shape, ProxBranch.PASS_THROUGH, dtype=object)
    branch[inside] = ProxBranch.ZERO
    branch[tie] = ProxBranch.TIE
    tie_alternative = np.full(center.shape, np.nan)
    tie_alternative[tie] = center[tie]
    return ProxResult(canonical, branch, tie_alternative, threshold)


def prox_distance(u, center, lam, alpha):
    """Euclidean distance from u to the (set-valued) prox of center.

    Both members of a tie count as allowed values.
    """
    result = prox_zero_one(center, lam, alpha)
    u = utils.as_vector(u, 'u', result.canonical.shape[0])
    gap = np.abs(u - result.canonical)
    ties = result.ties
    alternative = result.tie_alternative[ties]
    gap[ties] = np.minimum(gap[ties], np.abs(u[ties] - alternative))
    return float(np.sqrt(np.sum(gap * gap)))


def subdifferential_member(z, u):
    """Whether z lies in the limiting subdifferential of |(.)_+|_0 at u.

    That is z_i = 0 where u_i != 0, and z_i >= 0 where u_i = 0.
    """
    u = np.asarray(u, dtype=float)
    z = np.asarray(z, dtype=float)
    if u.shape != z.shape:
        raise errors.DimensionMismatchError(
            'u has shape %s, z has shape %s' % (u.shape, z.shape))
    return bool(np.all(np.where(u != 0, z == 0, z >= 0)))


def alpha_thresholds(u, z, lam):
    """Largest step sizes keeping (u, z) a prox fixed point.

    alpha_hat_u is the smallest u_i^2 / (2 lam) over u_i > 0 and
    alpha_hat_z the smallest 2 lam / z_i^2 over z_i > 0, each +inf when
    there is no such component. The alpha_star values for the original
    problem use the same formulas.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise errors.InvalidInputError(
            'lambda must be positive and finite, got %s' % lam)
    u = utils.as_vector(u, 'u')
    z = utils.as_vector(z, 'z', u.shape[0])

    positive_u = u[u > 0]
    positive_z = z[z > 0]
    hat_u = (float(np.min(positive_u * positive_u)) / (2.0 * lam)
             if positive_u.size else math.inf)
    hat_z = (2.0 * lam / float(np.max(positive_z)) ** 2
             if positive_z.size else math.inf)
    return AlphaThresholds(hat_u, hat_z, hat_u, hat_z)


def p_residual(problem, w, u, z, alpha):
    """Residuals of P-stationarity of (w, u, z) at step alpha.

    r_grad = |grad f(w) + A'z|, r_feas = |Aw + b - u| and
    r_prox = dist(u, Prox(u + alpha z)).
    """
    w, u, z, _ = problem.check_point(w, u, z)
    r_grad = np.linalg.norm(problem.objective.gradient(w) + problem.A.T @ z)
    r_feas = np.linalg.norm(problem.residual(w, u))
    r_prox = prox_distance(u, u + alpha * z, problem.lam, alpha)
    return StationarityResidual(r_grad, r_prox, r_feas=r_feas)


def p_tilde_residual(problem, w, u, z, v, z_tilde, mu, rho, alpha):
    """Residuals of P-tilde stationarity for the fixed-multiplier problem.

    Feasibility is replaced by the multiplier identity
    z = z_tilde + rho (Aw + b - u), and v has to equal w.
    """
    if not (mu > 0 and rho > 0):
        raise errors.InvalidInputError('mu and rho must be positive')
    w, u, z, v = problem.check_point(w, u, z, v)
    z_tilde = utils.as_vector(z_tilde, 'z_tilde', problem.n)
    r_grad = np.linalg.norm(problem.objective.gradient(w) + mu * (w - v)
                            + problem.A.T @ z)
    r_multiplier = np.linalg.norm(
        z - z_tilde - rho * problem.residual(w, u))
    r_prox = prox_distance(u, u + alpha * z, problem.lam, alpha)
    r_lyapunov_var = np.linalg.norm(v - w)
    return StationarityResidual(r_grad, r_prox, r_multiplier=r_multiplier,
                                r_lyapunov_var=r_lyapunov_var)


def verify_exact_penalty(problem, w, u, z, mu, rho, alpha, tol,
                         z_tilde=None):
    """Check the exact and strongly exact penalty relations at a point.

    The point is tested as a P-stationary triplet and, with v = w, as a
    P-tilde stationary point whose reference multiplier is ``z_tilde``
    (``z`` when omitted). The back map is strongly exact when, on top of
    that, the multiplier is unchanged by the update, which is the same as
    |Aw + b - u| <= tol.

    :returns: an ``ExactPenaltyCheck`` named tuple.
    """
    if not tol > 0:
        raise errors.InvalidInputError('tol must be positive')
    if z_tilde is None:
        z_tilde = z
    p_res = p_residual(problem, w, u, z, alpha)
    tilde_res = p_tilde_residual(problem, w, u, z, w, z_tilde, mu, rho,
                                 alpha)
    is_p = p_res.max_residual <= tol
    is_tilde = tilde_res.max_residual <= tol
    back_map = is_tilde and p_res.r_feas <= tol
    return ExactPenaltyCheck(is_p, is_tilde, back_map)


def strong_convexity_constant(sigma_f, rho, mu, norm_A):
    """Modulus of strong convexity of the smooth part of the Lyapunov
    problem, for a sigma_f-strongly convex f.
    """
    if sigma_f <= 0:
        return 0.0
    return (sigma_f * rho * mu
            / (sigma_f * (mu + rho) + rho * mu * norm_A ** 2
               + 2.0 * rho * mu))


def global_minimizer_certificate(problem, alpha, mu=None, rho=None,
                                 norm_A=None):
    """Tell whether a stationary point at step alpha is a global minimizer.

    For strongly convex f a P-stationary point with
    alpha > |A|^2 / sigma_f is the unique global minimizer of the original
    problem, and a P-tilde stationary point with alpha > 1 / sigma is the
    unique global minimizer of the Lyapunov problem. Both answers are None
    when sigma_f is 0; ``lyapunov`` is also None without mu and rho.

    :returns: a ``GlobalCertificate`` named tuple.
    """
    sigma_f = problem.objective.strong_convexity_sigma_f
    if sigma_f <= 0:
        LOG.debug('f is not known to be strongly convex, the global '
                  'certificate is unknown')
        return GlobalCertificate(None, None, None)
    if norm_A is None:
        norm_A = float(np.linalg.norm(problem.A, 2))
    original = alpha > norm_A ** 2 / sigma_f
    if mu is None or rho is None:
        return GlobalCertificate(original, None, None)
    sigma = strong_convexity_constant(sigma_f, rho, mu, norm_A)
    return GlobalCertificate(original, alpha * sigma > 1.0, sigma)


def exact_penalty_parameters(sigma_f, alpha, norm_A):
    """Lower bounds on (mu, rho) making the Lyapunov problem an exact
    penalty of the original one at step alpha.

    :raises: PreconditionError unless alpha * sigma_f > |A|^2 + 2.
    :returns: a tuple (mu_bound, rho_bound); rho_bound is the bound on
        rho once mu is set to twice mu_bound.
    """
    slack = alpha * sigma_f - norm_A ** 2 - 2.0
    if sigma_f <= 0 or slack <= 0:
        raise errors.PreconditionError(
            'alpha * sigma_f must exceed |A|^2 + 2')
    mu_bound = sigma_f / slack
    mu = 2.0 * mu_bound
    rho_bound = mu * sigma_f / (mu * slack - sigma_f)
    return mu_bound, rho_bound
