import json

import pytest
from django.conf import settings

from bertini_sieve.geom import ProjPoint, Subscheme, closed_point_of
from bertini_sieve.gf import field_create
from bertini_sieve.mpoly import parse

if not settings.configured:
    settings.configure()


@pytest.fixture
def gf2():
    return field_create(2)


@pytest.fixture
def gf3():
    return field_create(3)


@pytest.fixture
def gf4():
    return field_create(2, 2)


@pytest.fixture
def gf5():
    return field_create(5)


@pytest.fixture
def plane(gf2):
    return Subscheme.projective_space(gf2, 2)


@pytest.fixture
def rational():
    """Closed point of degree 1 from integer coordinates."""
    def make(base, *coords):
        return closed_point_of(base, ProjPoint.normalized(base, coords))
    return make


@pytest.fixture
def line_in_plane():
    """The line x0 = 0 in P^2, optionally minus rational points."""
    def make(base, excluded=()):
        points = [ProjPoint.normalized(base, c) for c in excluded]
        return Subscheme(base, 2, [parse('x0', 3, base)], excluded=points, dimension=1)
    return make


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2))
        return str(path)
    return write
