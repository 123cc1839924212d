from ...config import load_scheme
from ...geom import closed_points, count_points
from ..base import BertiniCommand

COLUMNS = ('degree', 'closed_points', 'rational_points')


class Command(BertiniCommand):
    help = 'Closed points of a scheme by degree.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--scheme', required=True, help='Scheme file (JSON)')
        parser.add_argument('--E', dest='E', type=int, default=3, help='Largest degree')
        parser.add_argument(
            '--list',
            dest='list',
            action='store_true',
            help='Print a representative of every closed point',
        )

    def handle(self, *args, **options):
        X = load_scheme(options['scheme'])
        E, threads = options['E'], options['threads']
        points = closed_points(X, E, threads)
        rows = []
        for r in range(1, E + 1):
            rows.append({
                'degree': r,
                'closed_points': sum(1 for x in points if x.degree == r),
                'rational_points': count_points(X, r, threads),
            })
        self.write_table(rows, COLUMNS, options['out'])
        if options['list']:
            for x in points:
                self.stdout.write(str(x))
