# Services package initialization

from .optimizer_service import design_optimizer
from .scheme_service import scheme_evaluator

# Export all service instances
__all__ = [
    'design_optimizer',
    'scheme_evaluator'
]


def init_services(app):
    """Initialize all services with Flask app"""
    design_optimizer.init_app(app)
    scheme_evaluator.init_app(app)
