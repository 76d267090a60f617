"""Command-line interface and run configuration."""

from .config import ConfigError, FleetPolicy, RunConfig, config_from_dict, load_config
from .main import EXIT_DOMAIN, EXIT_IO, EXIT_OK, SWEEP_ROWS, build_parser, main
