import logging
from logging.config import dictConfig
from typing import Optional

# Console goes to stderr; stdout is reserved for command results
LOGGING_CONFIG = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'default': {
            'format': '[%(asctime)s] %(levelname)s in %(module)s: %(message)s',
        }},
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'default',
        },
    },
    'loggers': {
        'panolift': {
            'level': 'WARNING',
            'handlers': ['console'],
            'propagate': False,
        },
    }
}

# Package-level logger every module imports
logger = logging.getLogger('panolift')


def configure_logging(level: str = 'WARNING', log_file: Optional[str] = None) -> None:
    """
    Applies LOGGING_CONFIG, optionally adding a file handler.

    Args:
        level (str): Level name for the package logger.
        log_file (Optional[str]): Extra destination for the same records.
    """
    config = {**LOGGING_CONFIG, 'handlers': dict(LOGGING_CONFIG['handlers'])}
    handlers = ['console']
    if log_file:
        config['handlers']['file'] = {
            'class': 'logging.FileHandler',
            'filename': log_file,
            'formatter': 'default',
        }
        handlers.append('file')
    config['loggers'] = {
        'panolift': {'level': level.upper(), 'handlers': handlers, 'propagate': False},
    }
    dictConfig(config)
    logger.debug('Logging configured at %s', level.upper())
