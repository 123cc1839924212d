"""bertini-sieve"""
import os

__version__ = '0.1.0'
__license__ = 'BSD License'

__author__ = 'bertini-sieve contributors'
__email__ = 'bertini-sieve@users.noreply.github.com'

__url__ = 'https://github.com/bertini-sieve/bertini-sieve'


def _setting(name, default):
    """Look ``name`` up in the Django settings, then the environment."""
    from django.conf import settings, ENVIRONMENT_VARIABLE
    value = None
    if settings.configured or os.environ.get(ENVIRONMENT_VARIABLE):
        value = getattr(settings, name, None)
    return int(value or os.environ.get(name) or default)


def enumeration_budget():
    return _setting('BERTINI_ENUMERATION_BUDGET', 2 ** 28)


def exhaustive_budget():
    return _setting('BERTINI_EXHAUSTIVE_BUDGET', 2 ** 25)


def image_budget():
    return _setting('BERTINI_IMAGE_BUDGET', 2 ** 22)


def rows_budget():
    return _setting('BERTINI_ROWS_BUDGET', 4096)


def chunk_size():
    return _setting('BERTINI_CHUNK_SIZE', 2 ** 14)


def thread_count():
    return _setting('BERTINI_THREADS', 1)
