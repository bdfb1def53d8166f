"""
structlog configuration for the command-line interface.

Log records go to stderr; stdout carries only result tables.
"""

import logging
import os
import sys
from typing import Optional

import structlog

from src.config.models import LogFormat, LoggingConfig, LogLevel


def resolve_level(flag: Optional[str], config: LoggingConfig) -> str:
    """LOG_LEVEL env first, then the command-line flag, then the settings file."""
    env = os.getenv("LOG_LEVEL")
    if env:
        return LogLevel(env.upper()).value
    if flag:
        return LogLevel(flag.upper()).value
    return config.level.value


def setup_logging(level: str = "INFO", fmt: LogFormat | str = LogFormat.TEXT) -> None:
    """
    Configure structlog on top of the standard library logger.

    Args:
        level: Level name (DEBUG, INFO, WARNING, ERROR, CRITICAL).
        fmt: ``json`` for one JSON object per line, ``text`` for humans.
    """
    renderer = (
        structlog.processors.JSONRenderer()
        if LogFormat(fmt) == LogFormat.JSON
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper()),
    )
