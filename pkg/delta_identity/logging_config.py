"""
Central logging configuration for the delta-identity package.

Configures a single root handler on stderr. If logging is already
configured (for example by pytest or an embedding application) the
existing handlers are left alone.

All other modules in the package obtain loggers via:

    logger = logging.getLogger(__name__)

Reports and CSV files never contain log output.
"""

from __future__ import annotations

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def parse_level(name: str) -> int:
    """
    Map a level name such as ``"debug"`` to its numeric value.

    :raises ValueError: On an unknown name.
    """
    level = logging.getLevelName(str(name).upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level: {name!r}")
    return level


def configure_logging(level: int = logging.INFO) -> None:
    """
    Configure package-wide logging.

    :param level: Logging level (e.g., logging.INFO, logging.DEBUG).
    """
    root = logging.getLogger()

    if root.handlers:
        root.setLevel(level)
        root.debug("Logging already configured; only the level was updated.")
        return

    root.setLevel(level)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)

    root.debug("Logging configured at level %s", logging.getLevelName(level))
