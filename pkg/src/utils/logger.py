# File: src/utils/logger.py
# Package logger: rotating run log, separate error log, console only in debug mode

import os
import logging
import logging.handlers

import dotenv

dotenv.load_dotenv()

LOGGER_NAME = 'majorana-phase'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Console output is off unless debug mode is switched on
DEBUG_MODE = False


class NullHandler(logging.Handler):
    """Placeholder console handler that drops every record"""

    def emit(self, record):
        pass


def resolve_log_dir() -> str:
    """MAJORANA_LOG_DIR, or <repo>/logs"""
    repo_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    return os.getenv('MAJORANA_LOG_DIR', os.path.join(repo_root, 'logs'))


def _file_handlers(log_dir: str, formatter: logging.Formatter):
    os.makedirs(log_dir, exist_ok=True)

    run_log = logging.handlers.TimedRotatingFileHandler(
        filename=os.path.join(log_dir, 'majorana.log'),
        when='midnight',
        backupCount=7,
        encoding='utf-8'
    )

    # failures also land in a small file of their own
    error_log = logging.handlers.RotatingFileHandler(
        filename=os.path.join(log_dir, 'error.log'),
        maxBytes=2 * 1024 * 1024,
        backupCount=5,
        encoding='utf-8'
    )
    error_log.setLevel(logging.ERROR)

    for handler in (run_log, error_log):
        handler.setFormatter(formatter)
    return [run_log, error_log]


def build_logger(log_dir: str = None) -> logging.Logger:
    """
    Create the package logger with its file handlers and a silent console

    Args:
        log_dir (str): directory for majorana.log and error.log

    Returns:
        logging.Logger: the configured 'majorana-phase' logger
    """
    built = logging.getLogger(LOGGER_NAME)
    built.setLevel(logging.INFO)
    built.propagate = False
    if not built.handlers:
        formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
        for handler in _file_handlers(log_dir or resolve_log_dir(), formatter):
            built.addHandler(handler)
        built.addHandler(NullHandler())
    return built


logger = build_logger()


def set_debug_mode(enabled=False):
    """
    Toggle console logging

    Args:
        enabled (bool): True to echo records to stderr at DEBUG level
    """
    global DEBUG_MODE
    DEBUG_MODE = enabled

    console = [h for h in logger.handlers if isinstance(h, NullHandler) or type(h) is logging.StreamHandler]
    for handler in console:
        logger.removeHandler(handler)

    if not enabled:
        logger.setLevel(logging.INFO)
        logger.addHandler(NullHandler())
        return

    stream = logging.StreamHandler()
    stream.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(stream)
    logger.setLevel(logging.DEBUG)
    logger.debug("Debug mode on, console logging enabled")
