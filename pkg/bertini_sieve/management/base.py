"""
    bertini_sieve.management.base
    ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    Shared options and output for the subcommands.
"""
import csv
import io
import logging
from contextlib import contextmanager
from fractions import Fraction

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from ..exceptions import BertiniError
from ..runner import setup_logging

logger = logging.getLogger('bertini_sieve')

BUDGET_SETTINGS = ('BERTINI_ENUMERATION_BUDGET', 'BERTINI_EXHAUSTIVE_BUDGET',
                   'BERTINI_IMAGE_BUDGET')

_MISSING = object()


def format_fraction(value):
    """``num/den (decimal)``, the decimal to 10 places."""
    if value is None:
        return '-'
    value = Fraction(value)
    return f'{value.numerator}/{value.denominator} ({float(value):.10f})'


@contextmanager
def budget_override(budget):
    """Run with every enumeration budget set to ``budget``."""
    if budget is None or not settings.configured:
        yield
        return
    saved = {name: getattr(settings, name, _MISSING) for name in BUDGET_SETTINGS}
    for name in BUDGET_SETTINGS:
        setattr(settings, name, budget)
    try:
        yield
    finally:
        for name, value in saved.items():
            if value is _MISSING:
                delattr(settings, name)
            else:
                setattr(settings, name, value)


class BertiniCommand(BaseCommand):
    """Base for the subcommands: logging, budgets and error exit codes."""

    requires_system_checks = []

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--threads',
            dest='threads',
            type=int,
            default=None,
            help='Worker threads for enumerations',
        )
        parser.add_argument(
            '--budget',
            dest='budget',
            type=int,
            default=None,
            help='Largest number of points, sections or image vectors to enumerate',
        )
        parser.add_argument(
            '--out',
            dest='out',
            default=None,
            help='Write the table to this file instead of standard output',
        )

    def execute(self, *args, **options):
        setup_logging(int(options.get('verbosity', 1)))
        try:
            with budget_override(options.get('budget')):
                return super().execute(*args, **options)
        except BertiniError as e:
            raise CommandError(str(e), returncode=e.exit_code) from e

    def write_table(self, rows, columns, out=None):
        """Write ``rows`` (dicts) as CSV, once, to ``out`` or standard output."""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        if out:
            with open(out, 'w', newline='') as f:
                f.write(buffer.getvalue())
            logger.info('Wrote %s rows to %s', len(rows), out)
        else:
            self.stdout.write(buffer.getvalue(), ending='')
