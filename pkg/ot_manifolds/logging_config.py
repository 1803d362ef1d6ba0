"""Structured logging configuration using structlog."""

import logging
import sys
from typing import Optional, Tuple

import structlog


def setup_logging(log_level: str = "WARNING", json_format: bool = True,
                  log_file: Optional[str] = None):
    """Configure structured logging on stderr.

    Certificates go to stdout or a file, so log records never mix with them.
    """
    renderer = (structlog.processors.JSONRenderer(sort_keys=True) if json_format
                else structlog.dev.ConsoleRenderer(colors=False))

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
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )

    root = logging.getLogger()
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(getattr(logging, log_level.upper()))

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(file_handler)


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance."""
    return structlog.get_logger(name)


def with_field_context(logger: structlog.BoundLogger, label: str, signature: Tuple[int, int]):
    """Add number field context to logger."""
    return logger.bind(field=label, signature=list(signature))


def with_check_context(logger: structlog.BoundLogger, check: str):
    """Add verification check context to logger."""
    return logger.bind(check=check)
