"""
    bertini_sieve.config
    ~~~~~~~~~~~~~~~~~~~~

    Loaders for scheme, condition and run files (JSON).

    A scheme file::

        {"p": 3, "k": 1, "n": 2, "equations": ["x0"], "non_equations": [],
         "excluded": [[0, 0, 1], [0, 1, 0]], "dimension": 1}

    An excluded closed point of higher degree is given as
    ``{"coords": [1, [0, 1]], "degree": 2}``, coordinates over GF(q^degree).

    Coordinates and coefficients are integers (read in the prime field) or
    coefficient lists ``[c0, c1, ...]`` over the generator ``t``.
"""
import hashlib
import json
import logging
import os

from tornado import escape
from tornado.util import ObjectDict

from .exceptions import BertiniError, ConfigError
from .geom import ProjPoint, Subscheme, closed_point_of
from .gf import FieldCtx, field_create
from .mpoly import Jet, jet_exponents, parse
from .taylor import (ConicTangentQuotient, ConstantQuotient, JetCondition,
                     QuotientCondition, RestrictionCondition, SmoothnessQuotient,
                     TaylorConditionSpec)

logger = logging.getLogger('bertini_sieve')

MODES = ('exact', 'exhaustive', 'mc')


class _Source:
    """The text of a loaded file, for error messages with line numbers."""

    def __init__(self, path):
        self.path = path
        try:
            with open(path) as f:
                self.text = f.read()
        except OSError as e:
            raise ConfigError(f'{path}: {e.strerror}')

    def line_of(self, needle):
        offset = self.text.find(needle) if needle else -1
        return self.text.count('\n', 0, offset) + 1 if offset >= 0 else None

    def error(self, message, needle=None):
        line = self.line_of(needle)
        where = f'{self.path}:{line}' if line else self.path
        return ConfigError(f'{where}: {message}')

    def decode(self):
        try:
            data = escape.json_decode(self.text)
        except ValueError as e:
            line = getattr(e, 'lineno', None)
            where = f'{self.path}:{line}' if line else self.path
            raise ConfigError(f'{where}: invalid JSON ({e})')
        if not isinstance(data, dict):
            raise ConfigError(f'{self.path}: expected a JSON object')
        return ObjectDict(data)


def element(ctx, value):
    """An element encoding from an integer or a coefficient list."""
    if isinstance(value, bool):
        raise ConfigError(f'{value!r} is not a field element')
    if isinstance(value, int):
        return ctx.lift(value).value
    if isinstance(value, list) and all(isinstance(c, int) for c in value):
        if len(value) > ctx.k:
            raise ConfigError(f'{value} has more than {ctx.k} coefficients')
        return ctx.from_coeffs([c % ctx.p for c in value]).value
    raise ConfigError(f'{value!r} is not a field element')


def point(base, coords, degree=1, parent=None):
    """The closed point through the given coordinates over GF(q^degree)."""
    K = base.extension(degree)
    try:
        pt = ProjPoint.normalized(K, [element(K, c) for c in coords])
        return closed_point_of(base, pt, parent)
    except BertiniError as e:
        raise ConfigError(f'bad point {coords}: {e}')


def field_of(data):
    if 'q' in data:
        return FieldCtx.from_order(int(data['q']))
    return field_create(int(data.get('p', 0)), int(data.get('k', 1)))


def scheme_from_dict(data, source=None):
    try:
        base = field_of(data)
    except BertiniError as e:
        raise _error(source, f'bad field: {e}', '"p"')
    if 'n' not in data:
        raise _error(source, 'missing ambient dimension "n"')
    n = int(data['n'])
    polys = {}
    for key in ('equations', 'non_equations'):
        polys[key] = []
        for src in data.get(key, []):
            try:
                polys[key].append(parse(src, n + 1, base))
            except BertiniError as e:
                raise _error(source, f'{key}: {e}', src)
    excluded = []
    for entry in data.get('excluded', []):
        coords, degree = entry, 1
        if isinstance(entry, dict):
            coords, degree = entry.get('coords', []), int(entry.get('degree', 1))
        if len(coords) != n + 1:
            raise _error(source, f'excluded point {coords} needs {n + 1} coordinates')
        excluded.append(point(base, coords, degree))
    try:
        return Subscheme(base, n, polys['equations'], polys['non_equations'], excluded,
                         dimension=data.get('dimension'), name=data.get('name'))
    except BertiniError as e:
        raise _error(source, str(e))


def _error(source, message, needle=None):
    if source is None:
        return ConfigError(message)
    return source.error(message, needle)


def load_scheme(path):
    source = _Source(path)
    scheme = scheme_from_dict(source.decode(), source)
    logger.debug('Loaded %s from %s', scheme, path)
    return scheme


def _jet(x, order, data):
    K = x.field
    exponents = jet_exponents(x.rep.n, order)
    coeffs = data.get('coeffs', data) if isinstance(data, dict) else None
    if coeffs is None:
        values = [element(K, v) for v in data]
        if len(values) != len(exponents):
            raise ConfigError(f'jet needs {len(exponents)} coefficients, got {len(values)}')
    else:
        lookup = {}
        for key, value in coeffs.items():
            exp = tuple(int(e) for e in key.split(','))
            if exp not in exponents:
                raise ConfigError(f'{key} is not a jet exponent of order {order}')
            lookup[exp] = element(K, value)
        values = [lookup.get(exp, 0) for exp in exponents]
    return Jet(K, order, x.chart, x.rep.n, tuple(values))


def condition_from_dict(data, scheme, source=None):
    kind = data.get('kind', 'quotient_nonvanishing')
    base = scheme.base
    try:
        if kind == 'quotient_nonvanishing':
            provider = data.get('provider', 'smoothness')
            if provider == 'smoothness':
                return QuotientCondition(scheme, SmoothnessQuotient(scheme))
            if provider == 'conic':
                Y = [point(base, coords).rep for coords in data.get('points', [])]
                return QuotientCondition(scheme, ConicTangentQuotient(Y))
            if provider == 'constant':
                per_point = {point(base, entry['point']).rep: entry['matrix']
                             for entry in data.get('per_point', [])}
                return QuotientCondition(scheme, ConstantQuotient(base, data['matrix'], per_point))
            raise ConfigError(f'unknown quotient provider {provider!r}')
        if kind == 'jet_allowed_set':
            x = point(base, data['point'], data.get('degree', 1))
            order = int(data.get('order', 2))
            jets = [_jet(x, order, jet) for jet in data.get('jets', [])]
            return JetCondition(x, order, jets, bool(data.get('complement', False)))
        if kind == 'restriction_to_Z':
            points, charts = [], []
            for entry in data.get('points', []):
                z = point(base, entry['coords'], entry.get('degree', 1))
                points.append(z)
                charts.append(entry.get('chart', z.chart))
            allowed = [tuple(element(z.field, v) for z, v in zip(points, t))
                       for t in data.get('allowed', [])]
            return RestrictionCondition(points, charts, allowed)
    except KeyError as e:
        raise _error(source, f'{kind}: missing key {e}', f'"{kind}"')
    except BertiniError as e:
        raise _error(source, f'{kind}: {e}', f'"{kind}"')
    raise _error(source, f'unknown condition kind {kind!r}')


def load_conditions(path, scheme):
    """A :class:`TaylorConditionSpec` from a condition file.

    A condition may name its own carrier with ``"scheme"`` (a path relative to
    the condition file); otherwise ``scheme`` is used.
    """
    source = _Source(path)
    data = source.decode()
    entries = data.get('conditions', [data])
    conditions = []
    for entry in entries:
        carrier = scheme
        if 'scheme' in entry:
            carrier = load_scheme(os.path.join(os.path.dirname(path), entry['scheme']))
        conditions.append(condition_from_dict(entry, carrier, source))
    return TaylorConditionSpec(conditions)


def d_range(value):
    """``3``, ``"1..5"`` or ``[1, 5]`` to a list of degrees."""
    if isinstance(value, int):
        return [value]
    if isinstance(value, str) and '..' in value:
        low, high = value.split('..', 1)
        return list(range(int(low), int(high) + 1))
    if isinstance(value, str):
        return [int(value)]
    if isinstance(value, list) and len(value) == 2:
        return list(range(int(value[0]), int(value[1]) + 1))
    raise ConfigError(f'bad degree range {value!r}')


def run_config(options, path=None):
    """Merge a run file (if any) under explicit command options and validate."""
    config = ObjectDict()
    base_dir = ''
    if path:
        config.update(_Source(path).decode())
        base_dir = os.path.dirname(path)
    for key, value in options.items():
        if value is not None:
            config[key] = value
    for key in ('scheme', 'condition'):
        if config.get(key) and path and options.get(key) is None:
            config[key] = os.path.join(base_dir, config[key])
    try:
        config.d = d_range(config.get('d', 1))
    except ValueError:
        raise ConfigError(f'bad degree range {config.get("d")!r}')
    config.e = int(config.get('e', 1))
    config.E = int(config.get('E', 1))
    config.mode = config.get('mode', 'exact')
    config.trials = int(config.get('trials', 10 ** 5))
    config.seed = int(config.get('seed', 0))
    if config.mode not in MODES:
        raise ConfigError(f'mode must be one of {", ".join(MODES)}, got {config.mode!r}')
    if min(config.d) < 0 or config.e < 1 or config.E < 1 or config.trials < 1:
        raise ConfigError('need d >= 0, e >= 1, E >= 1 and trials >= 1')
    return config


def config_hash(config):
    hasher = hashlib.md5()
    hasher.update(json.dumps(config, sort_keys=True, default=str).encode())
    return hasher.hexdigest()
