from ...sieve import conic_demo
from ..base import BertiniCommand, format_fraction


class Command(BertiniCommand):
    help = ('Conics through four points of P^2 tangent to a line: the tangent condition at '
            'the rational points of the line.')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--q', dest='q', type=int, default=5, help='Odd field order')
        parser.add_argument('--d', dest='d', type=int, default=3, help='Section degree')
        parser.add_argument('--e', dest='e', type=int, default=2,
                            help='Targets are the closed points of degree < e')
        parser.add_argument('--E', dest='E', type=int, default=None,
                            help='Degree cutoff of the predicted density')

    def handle(self, *args, **options):
        demo = conic_demo(options['q'], options['d'], options['e'], options['E'])
        self.stdout.write(f'conic through Y and {demo.point.rep}: {demo.conic.poly}')
        tangent = ', '.join(str(v) for v in demo.tangent)
        self.stdout.write(f'tangent direction: ({tangent})')
        report = demo.report
        self.stdout.write(f'rank {report.rank}, surjective: {report.surjective}')
        self.stdout.write(f'probability at d={report.d}: {format_fraction(report.probability)}')
        self.stdout.write(f'prediction: {format_fraction(demo.prediction)}')
