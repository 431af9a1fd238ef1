"""
Logging Module

Provides logging for the estimators and the CLI, kept like an experiment
log: each trial batch gets a line with its seeds, so a surprising result
can be traced back to the run that produced it. Reports go to stdout, so
the console handler writes to stderr.
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from datetime import datetime
from config import get_config


class ColorFormatter(logging.Formatter):
    """Formatter that colours the level name when stderr is a terminal."""

    # Color codes for terminal output
    COLORS = {
        'DEBUG': '\033[36m',    # Cyan
        'INFO': '\033[37m',     # White
        'WARNING': '\033[33m',  # Yellow
        'ERROR': '\033[31m',    # Red
        'CRITICAL': '\033[35m', # Magenta
        'RESET': '\033[0m'
    }

    def format(self, record):
        """Format log record with colors."""
        if hasattr(sys.stderr, 'isatty') and sys.stderr.isatty():
            levelname = record.levelname
            if levelname in self.COLORS:
                record = logging.makeLogRecord(record.__dict__)
                record.levelname = f"{self.COLORS[levelname]}{levelname}{self.COLORS['RESET']}"

        return super().format(record)


def setup_logger(name: str = "QMaxFlow") -> logging.Logger:
    """
    Set up a logger with file and console handlers.

    Args:
        name: Logger name (default: QMaxFlow)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Prevent duplicate handlers if logger already exists
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    config = get_config()

    if config.get("logging", "file_enabled"):
        log_dir = config.get_logs_path()
        log_file = log_dir / f"qmaxflow_{datetime.now().strftime('%Y%m%d')}.log"

        # File handler - rotating log files
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=config.get("logging", "max_bytes") or 10 * 1024 * 1024,
            backupCount=config.get("logging", "backup_count") or 5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(file_formatter)
        logger.addHandler(file_handler)

    # Console handler - stderr, stdout carries the reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_level = config.get("logging", "console_level") or "WARNING"
    console_handler.setLevel(getattr(logging, str(console_level).upper(), logging.WARNING))
    console_handler.setFormatter(ColorFormatter('%(levelname)-8s | %(message)s'))
    logger.addHandler(console_handler)

    logger.debug(f"Logger initialized | Name: {name}")

    return logger


def get_logger(name: str = "QMaxFlow") -> logging.Logger:
    """
    Get or create a logger instance.

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    logger = logging.getLogger(name)
    if not logger.handlers:
        return setup_logger(name)
    return logger


def set_console_level(level: str):
    """Change the console level of every logger created so far."""
    numeric = getattr(logging, level.upper(), logging.WARNING)
    for logger in [logging.getLogger(n) for n in list(logging.root.manager.loggerDict)]:
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, RotatingFileHandler):
                handler.setLevel(numeric)


# Module-level convenience functions
def log_estimate(kind: str, network: str, best: int, bound: int):
    """Log a finished rank estimate against its cut bound."""
    logger = get_logger()
    logger.info(f"Estimate finished | Kind: {kind} | Network: {network} | Best: {best} | QMC: {bound}")


def log_error(operation: str, error: Exception):
    """Log an error with context."""
    logger = get_logger()
    logger.error(f"Error during {operation}: {str(error)}", exc_info=True)


def log_startup():
    """Log application startup."""
    logger = get_logger()
    logger.info("QMaxFlow starting")


def log_shutdown():
    """Log application shutdown."""
    logger = get_logger()
    logger.info("QMaxFlow shutting down")
