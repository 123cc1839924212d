import csv
import io
import json

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from bertini_sieve import __version__
from bertini_sieve.management import available_commands, execute_from_command_line
from bertini_sieve.management.base import format_fraction
from bertini_sieve.management.commands import conic_demo, points, sieve, surjectivity, zeta
from bertini_sieve.sieve import CSV_COLUMNS


def run(command, **options):
    out, err = io.StringIO(), io.StringIO()
    call_command(command.Command(), stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


@pytest.fixture
def p1(write_json):
    return write_json('p1.json', {'p': 2, 'n': 1})


@pytest.fixture
def p2(write_json):
    return write_json('p2.json', {'p': 2, 'n': 2})


def test_format_fraction():
    assert format_fraction(None) == '-'
    assert format_fraction(3) == '3/1 (3.0000000000)'
    assert format_fraction(0.375) == '3/8 (0.3750000000)'


def test_zeta_of_projective_line(p1):
    out, _ = run(zeta, scheme=p1, E=10)
    rows = list(csv.DictReader(io.StringIO(out.split('truncated')[0])))
    assert [int(row['degree']) for row in rows] == list(range(1, 11))
    assert rows[0]['closed_points'] == '3'
    assert 'closed form: 3/8 (0.3750000000)' in out
    assert 'tail bound' in out


def test_points(p2):
    out, _ = run(points, scheme=p2, E=3)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(row['closed_points'], row['rational_points']) for row in rows] == \
        [('7', '7'), ('7', '21'), ('22', '73')]


def test_points_list(p2):
    out, _ = run(points, scheme=p2, E=1, list=True)
    assert '(0:0:1)' in out


def test_surjectivity(p2, tmp_path):
    target = tmp_path / 'table.csv'
    out, _ = run(surjectivity, scheme=p2, d='0..20', out=str(target))
    assert out.startswith('d0 = ')
    rows = list(csv.DictReader(target.open()))
    assert rows[0] == {'d': '0', 'rank': '1', 'rows': '21', 'surjective': '0'}
    assert rows[-1]['surjective'] == '1'


def test_surjectivity_warns_when_never_onto(p2):
    out, _ = run(surjectivity, scheme=p2, d='0..1')
    assert 'not surjective' in out


def test_sieve_exact_csv(p2):
    out, err = run(sieve, scheme=p2, d='1..2', e=2)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [row['d'] for row in rows] == ['1', '2']
    assert rows[0]['mode'] == 'exact'
    assert (rows[0]['probability_num'], rows[0]['probability_den']) == ('7', '8')
    assert rows[0]['config_hash'] == rows[1]['config_hash'] != ''
    assert 'predicted density' in err


def test_sieve_run_file(p2, write_json, tmp_path):
    run_file = write_json('run.json', {'scheme': 'p2.json', 'd': 1, 'e': 2,
                                       'mode': 'exhaustive'})
    target = tmp_path / 'reports.json'
    run(sieve, run=run_file, format='json', out=str(target))
    report, = json.loads(target.read_text())
    assert report['mode'] == 'exhaustive'
    assert report['config']['scheme'] == p2
    assert report['config_hash']


def test_sieve_monte_carlo_is_reproducible(p2):
    first, _ = run(sieve, scheme=p2, d='3', E=2, mode='mc', trials=2000, seed=5)
    again, _ = run(sieve, scheme=p2, d='3', E=2, mode='mc', trials=2000, seed=5, threads=2)
    assert first == again


def test_conic_demo():
    out, _ = run(conic_demo)
    assert 'tangent direction: (1, 2)' in out
    assert 'probability at d=3: 576/625' in out
    assert 'surjective: True' in out


def test_missing_scheme_is_a_config_error():
    with pytest.raises(CommandError) as excinfo:
        run(sieve, d='1')
    assert excinfo.value.returncode == 2


def test_budget_exceeded_exit_code(p2):
    with pytest.raises(CommandError) as excinfo:
        run(sieve, scheme=p2, d='3', mode='exhaustive', budget=100)
    assert excinfo.value.returncode == 3
    assert '--mode mc' in str(excinfo.value)


def test_precondition_exit_code(write_json):
    gf4_plane = write_json('p2q4.json', {'q': 4, 'n': 2})
    conic = write_json('conic.json', {'kind': 'quotient_nonvanishing', 'provider': 'conic',
                                      'points': [[1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]]})
    with pytest.raises(CommandError) as excinfo:
        run(surjectivity, scheme=gf4_plane, condition=conic, d='2')
    assert excinfo.value.returncode == 4


def test_bad_scheme_file_exit_code(write_json):
    with pytest.raises(CommandError) as excinfo:
        run(points, scheme=write_json('bad.json', {'p': 2}))
    assert excinfo.value.returncode == 2


def test_entry_point_help(capsys):
    execute_from_command_line(['bertini-sieve', '--help'])
    out = capsys.readouterr().out
    for name in ('conic-demo', 'diag', 'points', 'sieve', 'surjectivity', 'zeta'):
        assert name in available_commands()
        assert f'    {name}' in out


def test_entry_point_version(capsys):
    execute_from_command_line(['bertini-sieve', '--version'])
    assert capsys.readouterr().out.strip() == __version__


def test_entry_point_unknown_command(capsys):
    with pytest.raises(SystemExit) as excinfo:
        execute_from_command_line(['bertini-sieve', 'frobnicate'])
    assert excinfo.value.code == 2
    assert "Unknown command: 'frobnicate'" in capsys.readouterr().err


def test_entry_point_runs_a_command(p1, capsys):
    execute_from_command_line(['bertini-sieve', 'zeta', '--scheme', p1, '--E', '4'])
    assert 'closed form: 3/8' in capsys.readouterr().out
