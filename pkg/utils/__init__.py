# Utils package initialization

from .errors import (
    QIError,
    InvalidArgumentError,
    PreconditionViolationError,
    SensitivityUndefinedError,
    ConstraintInfeasibleError,
    SlopeUnstableError,
    BracketError,
    InternalConsistencyError,
    TruncationWarning
)
from .output_writer import output_writer

# Export the shared error types and utility instances
__all__ = [
    'QIError',
    'InvalidArgumentError',
    'PreconditionViolationError',
    'SensitivityUndefinedError',
    'ConstraintInfeasibleError',
    'SlopeUnstableError',
    'BracketError',
    'InternalConsistencyError',
    'TruncationWarning',
    'output_writer'
]
