from ...sieve import diagonal_counterexample
from ..base import BertiniCommand, format_fraction


class Command(BertiniCommand):
    help = ('Pair every section of degree <= d-max with its own closed point and show that '
            'no section satisfies the resulting conditions.')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--n', dest='n', type=int, default=2, help='Dimension of P^n')
        parser.add_argument('--q', dest='q', type=int, default=2, help='Field order')
        parser.add_argument('--d-max', dest='d_max', type=int, default=4,
                            help='Largest section degree')
        parser.add_argument('--E', dest='E', type=int, default=8,
                            help='Degree cutoff of the local product')
        parser.add_argument('--sample', dest='sample', type=int, default=32,
                            help='Pairs per degree rechecked by direct jet evaluation')

    def handle(self, *args, **options):
        report = diagonal_counterexample(options['n'], options['q'], options['d_max'],
                                         options['E'], options['sample'], options['threads'])
        for d, count in report.sections.items():
            status = 'empty' if report.empty[d] else 'NOT certified'
            self.stdout.write(f'd={d}: {count} sections, P_d {status}')
        self.stdout.write(f'{report.points_used} closed points used, up to degree '
                          f'{report.max_degree}; {report.rechecked_sample} sampled jets rechecked')
        degrees = f'0..{report.d_max}'
        if all(report.empty.values()):
            self.stdout.write(self.style.SUCCESS(f'P_d empty for d = {degrees}'))
        self.stdout.write(f'local product (E={report.E}) = {format_fraction(report.local_product)}')
        self.stdout.write(f'limit = {format_fraction(report.limit)}')
