"""
Error types shared by the engines, services and command line
"""


class QIError(Exception):
    """Base error carrying a machine-readable error code"""

    error_code = 'QI_ERROR'

    def __init__(self, message, details=None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self):
        """Convert error to the JSON shape emitted by the command line"""
        data = {
            'success': False,
            'error': self.message,
            'error_code': self.error_code
        }
        if self.details:
            data['details'] = self.details
        return data


class InvalidArgumentError(QIError, ValueError):
    error_code = 'INVALID_ARGUMENT'


class PreconditionViolationError(QIError):
    error_code = 'PRECONDITION_VIOLATION'


class SensitivityUndefinedError(QIError):
    error_code = 'SENSITIVITY_UNDEFINED'


class ConstraintInfeasibleError(QIError):
    error_code = 'CONSTRAINT_INFEASIBLE'


class SlopeUnstableError(QIError):
    error_code = 'SLOPE_UNSTABLE'


class BracketError(QIError):
    error_code = 'BRACKET_ERROR'


class InternalConsistencyError(QIError):
    error_code = 'INTERNAL_CONSISTENCY'


class TruncationWarning(UserWarning):
    """Fock-space truncation lost more norm than the configured limit"""
