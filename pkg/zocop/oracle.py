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

"""Brute-force references for small instances.

Nothing here shares numerics with the solver: the prox is checked on a
grid, stationary points are found by enumerating sign patterns and
active sets, and the Lyapunov strong-convexity modulus by sampling.
"""

import collections
import itertools
import math

import numpy as np
from oslo_log import log
from scipy import linalg

from zocop import core
from zocop import encoding
from zocop import errors
from zocop import zeroone

LOG = log.getLogger(__name__)

MAX_ENUMERATION_ROWS = 12
DEDUPLICATION_DISTANCE = 1e-8
ARGMIN_TOLERANCE = 1e-12
FEASIBILITY_TOLERANCE = 1e-10

ProxOracleResult = collections.namedtuple('ProxOracleResult',
                                          ['argmin_set', 'min_value'])

SigmaCheck = collections.namedtuple('SigmaCheck',
                                    ['sigma', 'holds', 'worst_violation'])


class StationaryCandidate(encoding.SerializableComparable):
    """A P-stationary triplet found by enumeration.

    ``sign_pattern`` is the set S of rows constrained to
    (Aw + b)_i <= 0 in the convex program that produced it.
    """

    serializable_fields = ('w', 'u', 'z', 'sign_pattern', 'objective',
                           'residual')

    def __init__(self, w, u, z, sign_pattern, objective, residual):
        self.w = w
        self.u = u
        self.z = z
        self.sign_pattern = sign_pattern
        self.objective = objective
        self.residual = residual

    @property
    def zero_one_loss(self):
        return core.CopProblem.zero_one_loss(self.u)


def prox_oracle(center, lam, alpha, grid_step=1e-4):
    """Minimize lam [t > 0] + (t - center)^2 / (2 alpha) by grid search.

    The grid covers center +- (3 sqrt(2 lam alpha) + 1) and is augmented
    with the exact candidates 0 and center; grid points closer than 1e-9
    to either candidate are dropped in favour of the candidate.

    :raises: PreconditionError if grid_step > 1e-3.
    :returns: a ``ProxOracleResult`` with a sorted tuple of minimizers.
    """
    if not 0 < grid_step <= 1e-3:
        raise errors.PreconditionError(
            'grid_step must lie in (0, 1e-3], got %s' % grid_step)
    half_width = 3.0 * math.sqrt(2.0 * lam * alpha) + 1.0
    grid = np.arange(center - half_width, center + half_width, grid_step)
    grid = grid[(np.abs(grid) > 1e-9) & (np.abs(grid - center) > 1e-9)]
    points = np.concatenate([grid, [0.0, float(center)]])
    values = lam * (points > 0) + (points - center) ** 2 / (2.0 * alpha)
    min_value = float(np.min(values))
    argmin = np.unique(points[values <= min_value + ARGMIN_TOLERANCE])
    return ProxOracleResult(tuple(float(t) for t in argmin), min_value)


def _constrained_minimizer(H_factor, H, c, A, b, pattern):
    """min 1/2 w'Hw + c'w s.t. (Aw + b)_S <= 0 by active-set enumeration.

    :returns: (w, z, active) with z embedded in n-space, or None when no
        active set yields a KKT point.
    """
    n = A.shape[0]
    p = H.shape[0]
    for size in range(len(pattern) + 1):
        for active in itertools.combinations(pattern, size):
            active = list(active)
            if not active:
                w = linalg.cho_solve(H_factor, -c)
                multipliers = np.zeros(0)
            else:
                A_E = A[active]
                kkt = np.block([[H, A_E.T],
                                [A_E, np.zeros((size, size))]])
                rhs = np.concatenate([-c, -b[active]])
                try:
                    solution = linalg.solve(kkt, rhs)
                except linalg.LinAlgError:
                    continue
                w = solution[:p]
                multipliers = solution[p:]
            if np.any(multipliers < -FEASIBILITY_TOLERANCE):
                continue
            slack = A[pattern] @ w + b[pattern] if pattern else np.zeros(0)
            if np.any(slack > FEASIBILITY_TOLERANCE):
                continue
            z = np.zeros(n)
            z[active] = np.maximum(multipliers, 0.0)
            return w, z, active
    return None


def enumerate_stationary(problem, alpha, tol=1e-8):
    """All P-stationary triplets of a small strongly convex quadratic
    instance at step alpha.

    For each sign pattern S the convex program
    min f(w) s.t. (Aw + b)_S <= 0 is solved exactly, u is set to Aw + b
    (clamped to 0 on the rows of S, exactly 0 on its active rows),
    z to the KKT multipliers (zero off the active set) and the triplet is
    kept when its P-stationarity residual is within tol.

    :raises: PreconditionError unless f is strongly convex quadratic, A
        has full row rank and n <= 12.
    :returns: candidates sorted by objective then sign pattern, with
        duplicates in w removed.
    """
    qf = problem.objective.quadratic_form
    if qf is None or problem.objective.strong_convexity_sigma_f <= 0:
        raise errors.PreconditionError(
            'enumeration needs a strongly convex quadratic objective')
    if problem.n > MAX_ENUMERATION_ROWS:
        raise errors.PreconditionError(
            'enumeration is limited to n <= %d, got %d'
            % (MAX_ENUMERATION_ROWS, problem.n))
    if not core.spectral_info(problem.A).full_row_rank:
        raise errors.PreconditionError(
            'enumeration needs A with full row rank')
    try:
        H_factor = linalg.cho_factor(qf.H)
    except linalg.LinAlgError:
        raise errors.PreconditionError('H is singular')

    found = []
    for mask in range(2 ** problem.n):
        pattern = [i for i in range(problem.n) if mask >> i & 1]
        solution = _constrained_minimizer(H_factor, qf.H, qf.c, problem.A,
                                          problem.b, pattern)
        if solution is None:
            continue
        w, z, active = solution
        # rows of the pattern hold (Aw + b)_i <= 0 up to roundoff
        u = problem.A @ w + problem.b
        u[pattern] = np.minimum(u[pattern], 0.0)
        u[active] = 0.0
        residual = zeroone.p_residual(problem, w, u, z, alpha)
        if residual.max_residual <= tol:
            found.append(StationaryCandidate(
                w, u, z, tuple(pattern), problem.objective_value(w, u),
                residual))

    found.sort(key=lambda cand: (cand.objective, cand.sign_pattern))
    unique = []
    for cand in found:
        if all(np.linalg.norm(cand.w - kept.w) > DEDUPLICATION_DISTANCE
               for kept in unique):
            unique.append(cand)
    LOG.debug('Enumerated %(count)d stationary points from %(total)d '
              'sign patterns', {'count': len(unique),
                                'total': 2 ** problem.n})
    return unique


def verify_sigma_constant(sigma_f, rho, mu, norm_A, trials=200, seed=0,
                          n=3, p=4):
    """Sample the strong convexity inequality of the Lyapunov smooth part.

    The smooth part is built for f = sigma_f / 2 |w|^2, a random A scaled
    to the requested norm, a random b and a random reference multiplier.

    :returns: a ``SigmaCheck`` named tuple; ``holds`` means no sampled
        pair violates the inequality by more than 1e-8.
    """
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, p))
    A *= norm_A / np.linalg.norm(A, 2)
    b = rng.standard_normal(n)
    z_ref = rng.standard_normal(n)
    sigma = zeroone.strong_convexity_constant(sigma_f, rho, mu, norm_A)

    def value(w, u, v):
        r = A @ w + b - u
        d = w - v
        return (0.5 * sigma_f * (w @ w) + 0.5 * mu * (d @ d) + z_ref @ r
                + 0.5 * rho * (r @ r))

    def gradient(w, u, v):
        scaled = z_ref + rho * (A @ w + b - u)
        return (sigma_f * w + mu * (w - v) + A.T @ scaled, -scaled,
                -mu * (w - v))

    worst = 0.0
    for _ in range(trials):
        x = (rng.standard_normal(p), rng.standard_normal(n),
             rng.standard_normal(p))
        y = (rng.standard_normal(p), rng.standard_normal(n),
             rng.standard_normal(p))
        grads = gradient(*y)
        diffs = [xi - yi for xi, yi in zip(x, y)]
        gap = (value(*x) - value(*y)
               - sum(g @ d for g, d in zip(grads, diffs))
               - 0.5 * sigma * sum(d @ d for d in diffs))
        worst = max(worst, -gap)
    return SigmaCheck(sigma, worst <= 1e-8, worst)
