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

"""Applications reduced to 0/1 composite problems: support vector
machines, twin SVMs, binary-relevance multi-label classification and
maximum rank correlation regression.
"""

import collections
from concurrent import futures
import math

import numpy as np
from oslo_log import log
from oslo_utils import excutils

from zocop import core
from zocop import encoding
from zocop import errors
from zocop import ialm
from zocop import utils

LOG = log.getLogger(__name__)


class Task(object):
    SVM = 'SVM'
    MLC = 'MLC'


Evaluation = collections.namedtuple(
    'Evaluation', ['accuracy', 'hamming_loss', 'zero_one_objective'])


class LabeledDataset(encoding.Serializable):
    """Raw features with binary labels y, label matrix Y or responses y.

    Features never include the bias column; builders append it.
    """

    serializable_fields = ('n', 'num_features', 'num_labels')

    def __init__(self, X, y=None, Y=None):
        self.X = utils.as_matrix(X, 'X')
        n = self.X.shape[0]
        self.y = None if y is None else utils.as_vector(y, 'y', n)
        self.Y = None
        if Y is not None:
            self.Y = utils.as_matrix(Y, 'Y')
            if self.Y.shape[0] != n:
                raise errors.DimensionMismatchError(
                    'Y has %d rows, X has %d' % (self.Y.shape[0], n))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def num_features(self):
        return self.X.shape[1]

    @property
    def num_labels(self):
        if self.Y is not None:
            return self.Y.shape[1]
        return None if self.y is None else 1


def append_bias(X):
    """Return X with a trailing column of ones."""
    X = np.asarray(X, dtype=float)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _check_binary(labels, name):
    if labels is None:
        raise errors.InvalidInputError('%s is required' % name)
    if not np.all((labels == 1) | (labels == -1)):
        raise errors.InvalidInputError(
            '%s must only contain -1 and +1' % name)


def _svm_constraints(X_bias, y):
    return -(y[:, None] * X_bias)


def build_svm(data, lam):
    """0/1 loss SVM: f = 1/2 |w|^2, A = -(y 1') * [X 1], b = 1.

    :raises: InvalidInputError for labels outside {-1, +1}.
    """
    _check_binary(data.y, 'y')
    X_bias = append_bias(data.X)
    objective = core.SmoothObjective.quadratic(np.eye(X_bias.shape[1]))
    return core.CopProblem(objective, _svm_constraints(X_bias, data.y),
                           np.ones(data.n), lam)


def build_tsvm(pos, neg, lambdas):
    """The two problems of a twin SVM.

    The first hyperplane stays close to the positive class, with
    H1 = I + lam1 X1'X1, and keeps the negative class on the far side:
    A1 = X-1, weight lam2. The second swaps the roles with lam3 and lam4
    and A2 = -X1.

    :param pos: raw features of the +1 class.
    :param neg: raw features of the -1 class.
    :param lambdas: (lam1, lam2, lam3, lam4).
    :raises: InvalidInputError if a class is empty.
    """
    lam1, lam2, lam3, lam4 = lambdas
    if min(lam1, lam3) < 0:
        raise errors.InvalidInputError(
            'lambda1 and lambda3 must be nonnegative')
    pos = np.asarray(pos, dtype=float)
    neg = np.asarray(neg, dtype=float)
    if pos.ndim != 2 or neg.ndim != 2 or not pos.shape[0] or \
            not neg.shape[0]:
        raise errors.InvalidInputError('both classes must be nonempty')
    X_pos = append_bias(utils.as_matrix(pos, 'pos'))
    X_neg = append_bias(utils.as_matrix(neg, 'neg', (neg.shape[0],
                                                     pos.shape[1])))
    eye = np.eye(X_pos.shape[1])

    first = core.CopProblem(
        core.SmoothObjective.quadratic(eye + lam1 * (X_pos.T @ X_pos)),
        X_neg, np.ones(X_neg.shape[0]), lam2)
    second = core.CopProblem(
        core.SmoothObjective.quadratic(eye + lam3 * (X_neg.T @ X_neg)),
        -X_pos, np.ones(X_pos.shape[0]), lam4)
    return first, second


def build_mlc(data, lam):
    """Binary relevance: one :func:`build_svm` problem per label column."""
    if data.Y is None:
        raise errors.InvalidInputError('Y is required for mlc')
    _check_binary(data.Y, 'Y')
    return [build_svm(LabeledDataset(data.X, y=data.Y[:, k]), lam)
            for k in range(data.Y.shape[1])]


def mrc_order(y):
    """Stable ascending order of the responses."""
    return np.argsort(np.asarray(y, dtype=float), kind='stable')


def difference_matrix(n):
    """(n-1) x n matrix with 1 on the diagonal and -1 above it."""
    return np.eye(n - 1, n) - np.eye(n - 1, n, k=1)


def build_mrc(X, y, lam1, lam2, xi=1e-3):
    """Ridge regression with a rank correlation zero-one term.

    Rows are sorted by ascending response (ties keep their order and are
    still constrained). f = 1/2 |Xw - y|^2 + lam1/2 |w|^2,
    A = B [X 1] and b = xi 1, so a component of Aw + b is nonpositive
    exactly when consecutive scores increase by at least xi.

    :raises: InvalidInputError for fewer than two observations.
    """
    X = utils.as_matrix(X, 'X')
    n = X.shape[0]
    if n < 2:
        raise errors.InvalidInputError('mrc needs at least 2 observations')
    y = utils.as_vector(y, 'y', n)
    if not (lam1 >= 0 and xi > 0):
        raise errors.InvalidInputError(
            'lambda1 must be nonnegative and xi positive')
    order = mrc_order(y)
    X_bias = append_bias(X[order])
    y_sorted = y[order]
    H = X_bias.T @ X_bias + lam1 * np.eye(X_bias.shape[1])
    objective = core.SmoothObjective.quadratic(
        H, -(X_bias.T @ y_sorted), 0.5 * float(y_sorted @ y_sorted))
    return core.CopProblem(objective, difference_matrix(n) @ X_bias,
                           xi * np.ones(n - 1), lam2)


def sgn(scores):
    """1 for strictly positive scores, -1 otherwise."""
    return np.where(np.asarray(scores) > 0, 1.0, -1.0)


def predict(w, X):
    """Labels of raw features X; w may hold one model per column."""
    return sgn(append_bias(X) @ np.asarray(w, dtype=float))


def predict_twin(w_pos, w_neg, X):
    """Assign each row of X to the class of the nearer hyperplane."""
    X_bias = append_bias(X)

    def distance(w):
        norm = np.linalg.norm(w)
        if norm == 0:
            return np.full(X_bias.shape[0], math.inf)
        return np.abs(X_bias @ w) / norm

    return np.where(distance(w_pos) <= distance(w_neg), 1.0, -1.0)


def evaluate(w, data, task=Task.SVM, tol=None):
    """Accuracy, hamming loss and zero-one objective of a linear model.

    :param w: p-vector for SVM, p x m matrix (one column per label) for
        MLC, p being the number of raw features plus one.
    :param tol: margin tolerance of :func:`zocop.core.margin_loss`.
    :raises: DimensionMismatchError if w does not fit the data.
    :returns: an ``Evaluation`` named tuple.
    """
    X_bias = append_bias(data.X)
    if task == Task.SVM:
        _check_binary(data.y, 'y')
        W = utils.as_vector(w, 'w', X_bias.shape[1])[:, None]
        labels = data.y[:, None]
    elif task == Task.MLC:
        _check_binary(data.Y, 'Y')
        W = np.asarray(w, dtype=float)
        labels = data.Y
        if W.shape != (X_bias.shape[1], labels.shape[1]):
            raise errors.DimensionMismatchError(
                'w must have shape %s, got %s'
                % ((X_bias.shape[1], labels.shape[1]), W.shape))
    else:
        raise errors.InvalidInputError('unknown task %r' % task)

    predictions = sgn(X_bias @ W)
    n, m = labels.shape
    zero_one = 0
    for k in range(m):
        margins = (_svm_constraints(X_bias, labels[:, k]) @ W[:, k]
                   + np.ones(n))
        zero_one += core.margin_loss(margins, tol)
    return Evaluation(float(np.mean(predictions == labels)),
                      float(np.sum(np.abs(predictions - labels))
                            / (2.0 * n * m)),
                      zero_one)


def train_svm(data, lam, **solve_kwargs):
    """Build and solve an SVM; keyword arguments go to
    :func:`zocop.ialm.solve_problem`.
    """
    return ialm.solve_problem(build_svm(data, lam), **solve_kwargs)


def train_tsvm(pos, neg, lambdas, **solve_kwargs):
    first, second = build_tsvm(pos, neg, lambdas)
    return (ialm.solve_problem(first, **solve_kwargs),
            ialm.solve_problem(second, **solve_kwargs))


def train_mrc(X, y, lam1, lam2, xi=1e-3, **solve_kwargs):
    return ialm.solve_problem(build_mrc(X, y, lam1, lam2, xi),
                              **solve_kwargs)


def train_mlc(data, lam, jobs=1, **solve_kwargs):
    """Solve every label problem, ``jobs`` of them at a time.

    :returns: the reports in label order.
    """
    problems = build_mlc(data, lam)
    if jobs <= 1 or len(problems) == 1:
        return [ialm.solve_problem(p, **solve_kwargs) for p in problems]

    LOG.info('Training %(m)d labels with %(jobs)d workers',
             {'m': len(problems), 'jobs': jobs})
    with futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        pending = [pool.submit(ialm.solve_problem, p, **solve_kwargs)
                   for p in problems]
        reports = []
        for label, future in enumerate(pending):
            try:
                reports.append(future.result())
            except Exception:
                with excutils.save_and_reraise_exception():
                    LOG.error('Training label %d failed', label)
    return reports


def make_separable_dataset(n=40, margin=0.5, seed=0, lift_scale=3.0):
    """Seeded 2-D points separated by a line through the origin.

    Every point lies at distance at least ``margin`` from the line. The
    points are lifted with one indicator feature per sample, scaled by
    ``lift_scale``, so the SVM constraint matrix has full row rank.
    """
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    normal = np.array([math.cos(angle), math.sin(angle)])
    along = np.array([-normal[1], normal[0]])
    y = np.where(rng.uniform(size=n) < 0.5, -1.0, 1.0)
    y[0], y[-1] = 1.0, -1.0
    offsets = margin + rng.uniform(0.0, 1.0, size=n)
    spread = rng.uniform(-1.0, 1.0, size=n)
    points = (y * offsets)[:, None] * normal + spread[:, None] * along
    return LabeledDataset(np.hstack([points, lift_scale * np.eye(n)]), y=y)


def make_monotone_dataset(n=15, seed=0, noise_scale=0.3):
    """Seeded regression data ranked by a known direction.

    The first feature is an evenly spaced score in [0.1, 1] that equals
    the response; the remaining n features are Gaussian noise. Rows come
    shuffled.

    :returns: (X, y, w_star) with X w_star = y.
    """
    rng = np.random.default_rng(seed)
    score = np.linspace(0.1, 1.0, n)
    noise = noise_scale * rng.standard_normal((n, n))
    X = np.hstack([score[:, None], noise])
    order = rng.permutation(n)
    w_star = np.zeros(n + 1)
    w_star[0] = 1.0
    return X[order], score[order], w_star
