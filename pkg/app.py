import logging

from flask import Flask
from flask.cli import FlaskGroup

from commands import register_commands
from config.settings import config, get_config_name
from services import init_services
from tasks import init_tasks
from utils.output_writer import output_writer


def create_app(config_name=None):
    """Application factory: configuration, singletons and command blueprints"""
    config_name = config_name or get_config_name()
    app = Flask(__name__)
    app.config.from_object(config[config_name])

    # library modules log through the root logger, commands through app.logger; both go to stderr
    level = getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.INFO)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.getLogger().setLevel(level)
    app.logger.setLevel(level)

    output_writer.init_app(app)
    init_services(app)
    init_tasks(app)
    register_commands(app)

    app.logger.debug(f'{app.config["TOOL_NAME"]} {app.config["TOOL_VERSION"]} started with {config_name} config')
    return app


cli = FlaskGroup(create_app=create_app, add_default_commands=False)


if __name__ == '__main__':
    cli()
