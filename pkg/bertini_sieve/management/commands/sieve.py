import json

from ...config import config_hash, load_conditions, load_scheme, run_config
from ...exceptions import BudgetExceeded, ConfigError
from ...sieve import (CSV_COLUMNS, build_evaluation_map, exact_low_probability,
                      exhaustive_probability, monte_carlo_probability, predicted_density)
from ...taylor import QuotientCondition, SmoothnessQuotient, TaylorConditionSpec
from ..base import BertiniCommand, format_fraction

OPTIONS = ('scheme', 'condition', 'd', 'e', 'E', 'mode', 'trials', 'seed')


class Command(BertiniCommand):
    help = ('Probability that a random hypersurface section of degree d meets the Taylor '
            'conditions, one CSV row per d.')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--run', dest='run', default=None,
                            help='Run file (JSON); explicit options take precedence')
        parser.add_argument('--scheme', default=None, help='Scheme file (JSON)')
        parser.add_argument('--condition', default=None,
                            help='Condition file (JSON); smoothness on the scheme without one')
        parser.add_argument('--d', dest='d', default=None, help='Degree or range, e.g. 1..5')
        parser.add_argument('--e', dest='e', type=int, default=None,
                            help='Low band: closed points of degree < e')
        parser.add_argument('--E', dest='E', type=int, default=None,
                            help='Closed points of degree <= E are checked')
        parser.add_argument('--mode', choices=('exact', 'exhaustive', 'mc'), default=None)
        parser.add_argument('--trials', type=int, default=None, help='Monte Carlo trials')
        parser.add_argument('--seed', type=int, default=None, help='Monte Carlo seed')
        parser.add_argument(
            '--format',
            dest='format',
            choices=('csv', 'json'),
            default='csv',
            help='json adds the resolved configuration to every report',
        )

    def handle(self, *args, **options):
        config = run_config({key: options[key] for key in OPTIONS}, options['run'])
        if not config.get('scheme'):
            raise ConfigError('no scheme given (--scheme or "scheme" in the run file)')
        X = load_scheme(config.scheme)
        if config.get('condition'):
            spec = load_conditions(config.condition, X)
        else:
            spec = TaylorConditionSpec([QuotientCondition(X, SmoothnessQuotient(X))])
        config.conditions = spec.to_json()
        digest = config_hash(config)

        reports = []
        for d in config.d:
            try:
                report = self.run_one(spec, d, config, options['threads'])
            except BudgetExceeded as e:
                raise BudgetExceeded(f'{e}; raise --budget, lower --d or use --mode mc')
            report.config, report.config_hash = dict(config), digest
            reports.append(report)

        if options['format'] == 'json':
            text = json.dumps([r.to_json() for r in reports], indent=2, default=str)
            if options['out']:
                with open(options['out'], 'w') as f:
                    f.write(text + '\n')
            else:
                self.stdout.write(text)
        else:
            self.write_table([r.csv_row() for r in reports], CSV_COLUMNS, options['out'])
        self.summary(spec, config, reports)

    def run_one(self, spec, d, config, threads):
        if config.mode == 'exact':
            report = exact_low_probability(build_evaluation_map(spec, d, config.e, threads),
                                           threads)
            report.e = config.e
            return report
        if config.mode == 'exhaustive':
            return exhaustive_probability(spec, d, config.E, config.e, threads)
        return monte_carlo_probability(spec, d, config.E, config.trials, config.seed,
                                       config.e, threads)

    def summary(self, spec, config, reports):
        last = reports[-1]
        value = last.probability if last.probability is not None else last.estimate
        self.stderr.write(f'd={last.d} ({last.mode}): '
                          f'{format_fraction(value) if last.probability is not None else value}')
        self.stderr.write(f'product of local probabilities: {format_fraction(last.prediction)}')
        if spec.carrier is not None:
            E = max(config.E, config.e - 1, 1)
            density = predicted_density(spec.carrier, spec.ell, E)
            if spec.restriction is not None:
                density *= spec.restriction.local_probability
            self.stderr.write(f'predicted density (E={E}): {format_fraction(density)}')
