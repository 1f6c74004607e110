"""
Main entry point for the ratnet command line.
"""

import logging

from ratnet.cli.main import cli, configure_logging

logger = logging.getLogger(__name__)


def main():
    """Main application entry point."""
    configure_logging("WARNING")
    cli(prog_name="ratnet")


if __name__ == "__main__":
    main()
