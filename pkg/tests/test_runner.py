import logging

from bertini_sieve.runner import Runner, setup_logging


def test_spans_cover_the_range():
    runner = Runner(threads=1, chunk=4)
    assert runner.spans(10) == [(0, 4), (4, 8), (8, 10)]
    assert runner.spans(0) == []


def test_results_come_back_in_chunk_order():
    def chunk(start, stop):
        return list(range(start, stop))

    serial = Runner(threads=1, chunk=3).map(chunk, 20)
    threaded = Runner(threads=4, chunk=3).map(chunk, 20)
    assert serial == threaded
    assert sum(serial, []) == list(range(20))


def test_defaults_come_from_settings(monkeypatch):
    monkeypatch.setenv('BERTINI_THREADS', '3')
    monkeypatch.setenv('BERTINI_CHUNK_SIZE', '128')
    runner = Runner()
    assert (runner.threads, runner.chunk) == (3, 128)


def test_setup_logging_is_idempotent():
    logger = setup_logging(0)
    handlers = len(logger.handlers)
    assert logger.level == logging.WARNING
    setup_logging(2)
    assert len(logger.handlers) == handlers
    assert logger.level == logging.DEBUG
    setup_logging(1)
    assert logger.level == logging.INFO
