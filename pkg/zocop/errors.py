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

from zocop import encoding


class ZocopError(Exception, encoding.Serializable):
    """Base class for errors generated by zocop."""
    # NOTE: `message` should not end with a period
    message = 'An error occurred'
    details = 'An unexpected error occurred.'
    exit_code = 1
    serializable_fields = ('type', 'code', 'message', 'details')

    def __init__(self, details=None, *args, **kwargs):
        super(ZocopError, self).__init__(*args, **kwargs)
        self.type = self.__class__.__name__
        self.code = self.exit_code
        if details:
            self.details = details

    def __str__(self):
        return "{}: {}".format(self.message, self.details)

    def __repr__(self):
        """Should look like ZocopError('message: details')"""
        return "{}('{}')".format(self.__class__.__name__, self.__str__())


class ValidationError(ZocopError):
    """Base class for errors caused by invalid user input."""

    message = 'Validation failed'
    exit_code = 3

    def __init__(self, details):
        super(ValidationError, self).__init__(details)


class InvalidInputError(ValidationError):
    """Error raised when numeric input is not usable (non-finite, empty)."""

    message = 'Invalid input'


class InvalidObjectiveError(ValidationError):
    """Error raised when a smooth objective returns non-finite data."""

    message = 'Invalid objective'


class DimensionMismatchError(ValidationError):
    """Error raised when vector and matrix shapes disagree."""

    message = 'Dimension mismatch'


class UnsupportedVariantError(ValidationError):
    """Error raised when a w-step variant cannot be used for a problem."""

    message = 'Unsupported variant'


class PreconditionError(ValidationError):
    """Error raised when an operation's precondition does not hold."""

    message = 'Precondition violated'


class ConfigValidationError(ValidationError):
    """Error raised when run or solver configuration is invalid."""

    message = 'Invalid configuration'


class UnknownCommandError(ValidationError):
    """Error raised when no runner is registered for a sub-command."""

    message = 'Unknown command'


class RankDeficiencyError(ZocopError):
    """Error raised when A is not full row rank and strict mode is on."""

    message = 'Constraint matrix is rank deficient'
    exit_code = 2

    def __init__(self, gamma, tolerance):
        details = ('smallest singular value %(gamma)s does not exceed the '
                   'rank tolerance %(tol)s' % {'gamma': gamma,
                                               'tol': tolerance})
        super(RankDeficiencyError, self).__init__(details)


class DivergenceError(ZocopError):
    """Error raised when the Lyapunov value becomes non-finite."""

    message = 'Solver diverged'

    def __init__(self, details):
        super(DivergenceError, self).__init__(details)


class InternalSolverError(ZocopError):
    """Error raised when a linear system that must be solvable is not."""

    message = 'Internal solver error'

    def __init__(self, details):
        super(InternalSolverError, self).__init__(details)


class DatasetParseError(ValidationError):
    """Error raised when a dataset file cannot be parsed."""

    message = 'Dataset could not be parsed'

    def __init__(self, path, line, reason):
        self.path = path
        self.line = line
        details = '%(path)s line %(line)s: %(reason)s' % {
            'path': path, 'line': line, 'reason': reason}
        super(DatasetParseError, self).__init__(details)


class ProblemFileError(ValidationError):
    """Error raised when a key=value problem file is malformed."""

    message = 'Problem file is invalid'


class TraceFormatError(ValidationError):
    """Error raised when a trace file does not follow the CSV contract."""

    message = 'Trace file is invalid'


class ZocopIOError(ZocopError):
    """Error raised when reading or writing a file fails."""

    message = 'I/O error'
    exit_code = 4

    def __init__(self, path, reason):
        self.path = path
        details = '%(path)s: %(reason)s' % {'path': path, 'reason': reason}
        super(ZocopIOError, self).__init__(details)
