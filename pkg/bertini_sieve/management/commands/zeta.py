from ...config import load_scheme
from ...geom import euler_factor, zeta_inverse_truncated
from ..base import BertiniCommand, format_fraction

COLUMNS = ('degree', 'closed_points', 'factor_num', 'factor_den', 'partial_num', 'partial_den',
           'partial')


class Command(BertiniCommand):
    help = 'Euler product of a scheme truncated to closed points of bounded degree.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--scheme', required=True, help='Scheme file (JSON)')
        parser.add_argument('--s', dest='s', type=int, default=2, help='Zeta argument')
        parser.add_argument('--E', dest='E', type=int, default=6, help='Degree cutoff')

    def handle(self, *args, **options):
        X = load_scheme(options['scheme'])
        zeta = zeta_inverse_truncated(X, options['s'], options['E'], options['threads'])
        rows = []
        for r, c, partial in zeta.per_degree:
            factor = euler_factor(zeta.q, zeta.s, r) ** c
            rows.append({
                'degree': r,
                'closed_points': c,
                'factor_num': factor.numerator,
                'factor_den': factor.denominator,
                'partial_num': partial.numerator,
                'partial_den': partial.denominator,
                'partial': f'{float(partial):.10f}',
            })
        self.write_table(rows, COLUMNS, options['out'])
        self.stdout.write(f'truncated zeta^-1 at s={zeta.s}, E={zeta.E}: '
                          f'{format_fraction(zeta.value)}')
        if zeta.closed_form is not None:
            self.stdout.write(f'closed form: {format_fraction(zeta.closed_form)}')
        if zeta.tail_bound is not None:
            self.stdout.write(f'tail bound: {zeta.tail_bound:.3e}')
