"""
    bertini_sieve.runner
    ~~~~~~~~~~~~~~~~~~~~

    Chunked execution over index ranges and logging setup for command runs.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from tornado.log import LogFormatter

from . import chunk_size, thread_count

logger = logging.getLogger('bertini_sieve')

_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def setup_logging(verbosity=1):
    """Attach one stream handler to the package logger.

    :param verbosity: 0 for warnings only, 1 for progress, 2 and above for debug
    """
    logger.setLevel(_LEVELS.get(verbosity, logging.DEBUG))
    if not any(getattr(handler, 'bertini', False) for handler in logger.handlers):
        channel = logging.StreamHandler()
        channel.setFormatter(LogFormatter())
        channel.bertini = True
        logger.addHandler(channel)
    return logger


class Runner:
    """Maps a chunk function over ``range(total)``.

    ``func(start, stop)`` is called once per chunk; results come back in chunk
    order whatever the thread count, so callers aggregating them get the
    same answer with one thread or many::

        runner = Runner(threads=4)
        counts = runner.map(count_chunk, 2 ** 21)

    :param threads: worker threads, defaults to :func:`bertini_sieve.thread_count`
    :param chunk: indices per chunk, defaults to :func:`bertini_sieve.chunk_size`
    """

    def __init__(self, threads=None, chunk=None):
        self.threads = max(1, int(threads or thread_count()))
        self.chunk = max(1, int(chunk or chunk_size()))

    def spans(self, total):
        return [(start, min(start + self.chunk, total))
                for start in range(0, total, self.chunk)]

    def map(self, func, total):
        spans = self.spans(total)
        logger.debug('Running %s chunks on %s threads', len(spans), self.threads)
        if self.threads == 1 or len(spans) <= 1:
            return [func(start, stop) for start, stop in spans]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(lambda span: func(*span), spans))
