"""
Spandiag - Diagnostic Evaluation for Span Identification.

Builds linguistically controlled test suites, scores predictions per
span attribute and extrapolates recall onto unseen datasets.
"""

import sys
import logging
from typing import List

from core.config_manager import config
from core.cli import run

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

level_map = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def _handlers() -> List[logging.Handler]:
    handlers: List[logging.Handler] = []
    if config.logging_file:
        handlers.append(logging.FileHandler(config.logging_file, mode='a', encoding='utf-8'))
    # stderr only; stdout carries command output
    if config.logging_console:
        handlers.append(logging.StreamHandler(sys.stderr))
    return handlers


def setup_logging() -> None:
    """Configure the root logger from the [logging] config section."""
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)

    if not config.logging_enabled:
        root_logger.setLevel(logging.CRITICAL + 1)
        return

    root_logger.setLevel(level_map.get(config.logging_level.upper(), logging.WARNING))
    formatter = logging.Formatter(LOG_FORMAT)
    for handler in _handlers():
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)


def main() -> None:
    """Application entry point."""
    setup_logging()
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
