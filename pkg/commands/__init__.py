# Commands package initialization

from .analysis import analysis_bp
from .curves import curves_bp
from .verify import verify_bp

__all__ = [
    'analysis_bp',
    'curves_bp',
    'verify_bp'
]


def register_commands(app):
    """Register all command blueprints with the Flask app"""
    app.register_blueprint(analysis_bp)
    app.register_blueprint(curves_bp)
    app.register_blueprint(verify_bp)
