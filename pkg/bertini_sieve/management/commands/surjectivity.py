from ...config import d_range, load_conditions, load_scheme
from ...sieve import surjectivity_table
from ...taylor import QuotientCondition, SmoothnessQuotient, TaylorConditionSpec
from ..base import BertiniCommand

COLUMNS = ('d', 'rank', 'rows', 'surjective')


def condition_spec(options):
    """The condition file's conditions, or smoothness on the scheme without one."""
    X = load_scheme(options['scheme'])
    if options.get('condition'):
        return load_conditions(options['condition'], X)
    return TaylorConditionSpec([QuotientCondition(X, SmoothnessQuotient(X))])


class Command(BertiniCommand):
    help = 'Rank of the evaluation map onto the low band targets, per degree d.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--scheme', required=True, help='Scheme file (JSON)')
        parser.add_argument('--condition', default=None, help='Condition file (JSON)')
        parser.add_argument('--e', dest='e', type=int, default=2,
                            help='Targets are the closed points of degree < e')
        parser.add_argument('--d', dest='d', default='0..6', help='Degree range, e.g. 0..6')

    def handle(self, *args, **options):
        spec = condition_spec(options)
        table = surjectivity_table(spec, options['e'], d_range(options['d']), options['threads'])
        rows = [{'d': d, 'rank': rank, 'rows': total, 'surjective': int(surjective)}
                for d, rank, total, surjective in table.rows]
        self.write_table(rows, COLUMNS, options['out'])
        if table.threshold is None:
            self.stdout.write(self.style.WARNING('not surjective at the end of the range'))
        else:
            self.stdout.write(f'd0 = {table.threshold}')
