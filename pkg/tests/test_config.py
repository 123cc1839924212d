import pytest

from bertini_sieve.config import (config_hash, d_range, element, load_conditions,
                                  load_scheme, run_config)
from bertini_sieve.exceptions import ConfigError
from bertini_sieve.geom import count_points

U_SCHEME = {
    'p': 5, 'n': 2, 'equations': ['x0'], 'dimension': 1, 'name': 'U',
    'excluded': [[0, 0, 1], [0, 1, 0], [0, 1, 1], [0, 1, 4]],
}


def test_load_scheme(write_json):
    X = load_scheme(write_json('u.json', U_SCHEME))
    assert X.name == 'U'
    assert X.dimension == 1
    assert count_points(X, 1) == 2


def test_load_scheme_from_order(write_json):
    X = load_scheme(write_json('p2.json', {'q': 4, 'n': 2}))
    assert X.q == 4
    assert count_points(X, 1) == 21


def test_load_scheme_excluding_a_quadratic_point(write_json):
    data = {'p': 2, 'n': 1, 'excluded': [{'coords': [1, [0, 1]], 'degree': 2}]}
    X = load_scheme(write_json('line.json', data))
    (z,) = X.excluded
    assert z.degree == 2
    assert [count_points(X, r) for r in (1, 2, 4)] == [3, 3, 15]


def test_parse_error_names_the_line(write_json):
    data = dict(U_SCHEME, equations=['x0 +* x1'])
    path = write_json('bad.json', data)
    with pytest.raises(ConfigError) as excinfo:
        load_scheme(path)
    message = str(excinfo.value)
    assert message.startswith(f'{path}:')
    assert 'position' in message
    line = int(message[len(path) + 1:].split(':')[0])
    with open(path) as f:
        assert 'x0 +* x1' in f.read().splitlines()[line - 1]


def test_invalid_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "p": 2,\n  "n": \n}\n')
    with pytest.raises(ConfigError) as excinfo:
        load_scheme(str(path))
    assert str(excinfo.value).startswith(f'{path}:4')


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_scheme(str(tmp_path / 'nope.json'))


def test_bad_field(write_json):
    with pytest.raises(ConfigError):
        load_scheme(write_json('bad.json', {'p': 6, 'n': 2}))


def test_element(gf4):
    assert element(gf4, 3) == 1
    assert element(gf4, [1, 1]) == 3
    with pytest.raises(ConfigError):
        element(gf4, [1, 1, 1])
    with pytest.raises(ConfigError):
        element(gf4, 'one')


def test_load_conditions(write_json):
    X = load_scheme(write_json('u.json', U_SCHEME))
    path = write_json('cond.json', {'conditions': [
        {'kind': 'quotient_nonvanishing', 'provider': 'conic',
         'points': [[1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]]},
        {'kind': 'restriction_to_Z', 'points': [{'coords': [0, 1, 1]}], 'allowed': [[1]]},
        {'kind': 'jet_allowed_set', 'point': [1, 0, 0], 'order': 2, 'complement': True,
         'jets': [{'0,0': 0}]},
    ]})
    spec = load_conditions(path, X)
    assert [c.kind for c in spec.conditions] == \
        ['quotient_nonvanishing', 'restriction_to_Z', 'jet_allowed_set']
    assert spec.carrier is X
    assert spec.ell == 1
    jet = spec.jet_conditions
    (x, condition), = jet.items()
    assert str(x.rep) == '(1:0:0)'
    assert condition.allowed_values == {(0, 0, 0)}


def test_single_condition_defaults_to_smoothness(write_json):
    X = load_scheme(write_json('p2.json', {'p': 2, 'n': 2}))
    spec = load_conditions(write_json('cond.json', {}), X)
    assert [c.provider.name for c in spec.quotients] == ['smoothness']


def test_unknown_condition_kind(write_json):
    X = load_scheme(write_json('p2.json', {'p': 2, 'n': 2}))
    with pytest.raises(ConfigError):
        load_conditions(write_json('cond.json', {'kind': 'tangent'}), X)


def test_degree_point_in_condition(write_json):
    X = load_scheme(write_json('p2.json', {'p': 2, 'n': 2}))
    spec = load_conditions(write_json('cond.json', {
        'kind': 'restriction_to_Z',
        'points': [{'coords': [1, [0, 1], [1, 1]], 'degree': 2}],
        'allowed': [[0]],
    }), X)
    z, = spec.restriction.points
    assert z.degree == 2
    assert spec.restriction.h0_size == 4


def test_d_range():
    assert d_range(3) == [3]
    assert d_range('1..4') == [1, 2, 3, 4]
    assert d_range([2, 3]) == [2, 3]
    with pytest.raises(ConfigError):
        d_range({'from': 1})


def test_run_config_merges_file_and_options(write_json, tmp_path):
    path = write_json('run.json', {'scheme': 'u.json', 'd': '1..3', 'mode': 'exhaustive',
                                   'E': 2})
    config = run_config({'mode': 'mc', 'seed': 11, 'scheme': None}, path)
    assert config.scheme == str(tmp_path / 'u.json')
    assert config.d == [1, 2, 3]
    assert config.mode == 'mc'
    assert (config.E, config.e, config.seed) == (2, 1, 11)


def test_run_config_validates():
    with pytest.raises(ConfigError):
        run_config({'mode': 'fast'})
    with pytest.raises(ConfigError):
        run_config({'e': 0})
    with pytest.raises(ConfigError):
        run_config({'d': 'x..y'})


def test_config_hash_is_stable():
    a = run_config({'d': '1..2', 'scheme': 'x.json'})
    b = run_config({'scheme': 'x.json', 'd': [1, 2]})
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(run_config({'d': 3, 'scheme': 'x.json'}))
