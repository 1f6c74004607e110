"""
Command-line entry point for ratnet.
"""

import logging
from pathlib import Path
from typing import Optional

import click

from .. import __version__
from ..config import Config, load_config, get_env_config, initialize_env_config
from ..exceptions import ConfigError, RatnetError

logger = logging.getLogger(__name__)


def configure_logging(log_level: str = "INFO"):
    """Configure logging with the specified level."""
    level_map = {
        "DEBUG": logging.DEBUG,
        "INFO": logging.INFO,
        "WARNING": logging.WARNING,
        "ERROR": logging.ERROR,
        "CRITICAL": logging.CRITICAL
    }

    numeric_level = level_map.get(log_level.upper(), logging.INFO)

    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True  # Force reconfiguration even if logging was already configured
    )

    ratnet_logger = logging.getLogger('ratnet')
    ratnet_logger.setLevel(numeric_level)
    ratnet_logger.propagate = True

    logging.getLogger().setLevel(numeric_level)

    # Loggers created before this call keep their own level unless reset here
    for logger_name in list(logging.Logger.manager.loggerDict.keys()):
        if logger_name.startswith('ratnet'):
            child = logging.getLogger(logger_name)
            child.setLevel(numeric_level)
            child.propagate = True


class RatnetGroup(click.Group):
    """Click group that turns ratnet errors into their exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except RatnetError as e:
            logger.error(f"{e.__class__.__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)


def _load_base_config(config_path: Optional[str]) -> Config:
    if config_path is not None:
        logger.info(f"Loading configuration from {config_path}")
        return load_config(config_path)
    default_path = Path(get_env_config().get_config_path())
    if default_path.exists():
        logger.info(f"Loading configuration from {default_path}")
        return load_config(str(default_path))
    logger.debug(f"No configuration file at {default_path}; using built-in defaults")
    return Config()


@click.group(cls=RatnetGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="YAML run configuration (default: $RATNET_CONFIG or ./config.yaml when present)")
@click.option("--env-file", type=click.Path(dir_okay=False), default=None,
              help=".env file whose variables feed ${VAR} substitution (default: ./.env)")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
@click.version_option(version=__version__, prog_name="ratnet")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], env_file: Optional[str], log_level: Optional[str]):
    """Ratio net, MLP and RBF function approximators: training and benchmarks."""
    configure_logging(log_level or "WARNING")
    if env_file is not None:
        if not Path(env_file).exists():
            raise ConfigError(f"Environment file not found: {env_file}")
        initialize_env_config(env_file)
    config = _load_base_config(config_path)
    configure_logging(log_level or config.logging.level)
    ctx.obj = {"config": config}


from . import train as _train  # noqa: E402,F401  (registers commands)
from . import tools as _tools  # noqa: E402,F401
