# Tasks package initialization

from .figure_tasks import figure_tasks
from .sweep_tasks import sweep_tasks
from .verification_tasks import verification_tasks

# Export all task instances
__all__ = [
    'figure_tasks',
    'sweep_tasks',
    'verification_tasks'
]


def init_tasks(app):
    """Initialize all tasks with Flask app"""
    sweep_tasks.init_app(app)
    figure_tasks.init_app(app)
    verification_tasks.init_app(app)
