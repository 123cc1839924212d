import itertools
from fractions import Fraction

import numpy as np
import pytest

from bertini_sieve.exceptions import (FieldMismatch, GeneralPositionError,
                                      PreconditionViolated, SingularPoint)
from bertini_sieve.geom import ProjPoint, Subscheme, closed_points_of_degree
from bertini_sieve.gf import build_embedding, field_create
from bertini_sieve.mpoly import Jet, MPoly, evaluate, monomials, parse, partial
from bertini_sieve.taylor import (ConicTangentQuotient, ConstantQuotient, JetCondition,
                                  QuotientAtPoint, QuotientCondition, RestrictionCondition,
                                  SmoothnessQuotient, TaylorConditionSpec, conic_tangent_quotient,
                                  conic_through, eval_jet_condition, eval_quotient_condition,
                                  restrict_to_Z, smoothness_quotient, taylor1_fiber,
                                  transform_quotient)

Y_COORDS = ((1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1))


@pytest.fixture
def Y(gf5):
    return [ProjPoint(gf5, c) for c in Y_COORDS]


def test_conic_through_four_points_and_x(gf5, Y, rational):
    x = rational(gf5, 0, 1, 2)
    conic = conic_through(Y, x)
    # -(x1^2 + x2^2 - x0*x1 - x0*x2), scaled to a leading 1
    assert conic.coefficients == (0, 1, 1, 4, 0, 4)
    assert conic.poly == 4 * parse('x1^2 + x2^2 - x0*x1 - x0*x2', 3, gf5)
    assert conic.smooth


def test_conic_tangent(gf5, Y, rational):
    x = rational(gf5, 0, 1, 2)
    quotient = conic_tangent_quotient(conic_through(Y, x), x)
    assert quotient.ell == 1
    assert quotient.matrix == ((1, 2),)
    assert quotient.chart == 1


def test_conic_needs_general_position(gf5, rational):
    collinear = [ProjPoint(gf5, c) for c in ((1, 0, 0), (1, 1, 0), (1, 2, 0), (1, 3, 0))]
    with pytest.raises(GeneralPositionError):
        conic_through(collinear, rational(gf5, 0, 0, 1))


def test_singular_conic(gf5, Y, rational):
    # only the line pair x1*(x1 - x0) passes through Y and (1:0:2)
    with pytest.raises(SingularPoint):
        conic_through(Y, rational(gf5, 1, 0, 2))


def test_conic_needs_odd_characteristic(gf2, rational):
    points = [ProjPoint(gf2, c) for c in Y_COORDS]
    with pytest.raises(PreconditionViolated):
        conic_through(points, rational(gf2, 0, 1, 1))


def test_smoothness_quotient_on_a_line(gf3, line_in_plane, rational):
    line = line_in_plane(gf3)
    x = rational(gf3, 0, 1, 1)
    quotient = smoothness_quotient(line, x)
    assert quotient.ell == 1
    assert quotient.chart == 1
    # gradient coordinates (x0, x2) in chart 1; the line is x0 = 0
    assert quotient.matrix == ((0, 1),)


def test_smoothness_quotient_of_projective_space(plane, rational, gf2):
    quotient = smoothness_quotient(plane, rational(gf2, 1, 0, 0))
    assert quotient.matrix == ((1, 0), (0, 1))


def test_singular_point_of_carrier(gf5, rational):
    nodal = Subscheme(gf5, 2, [parse('x1^2*x0 - x2^2*x0 - x2^3', 3, gf5)], dimension=1)
    with pytest.raises(SingularPoint):
        smoothness_quotient(nodal, rational(gf5, 1, 0, 0))


def test_quotient_rank_is_checked(gf3, rational):
    x = rational(gf3, 1, 0, 0)
    with pytest.raises(PreconditionViolated):
        QuotientAtPoint(x, 2, ((1, 0), (2, 0)))


def test_eval_quotient_condition(gf5, Y, rational):
    x = rational(gf5, 0, 1, 2)
    quotient = conic_tangent_quotient(conic_through(Y, x), x)
    # vanishes at x, gradient (2, 4) is orthogonal to the tangent (1, 2)
    conic = parse('x1^2 + x2^2 - x0*x1 - x0*x2', 3, gf5)
    assert not eval_quotient_condition(quotient, conic)
    assert eval_quotient_condition(quotient, parse('x0*x1 + x0*x2', 3, gf5))
    assert eval_quotient_condition(quotient, parse('x1^2', 3, gf5))


def test_transform_quotient_preserves_the_condition(gf5, rational):
    x = rational(gf5, 1, 2, 3)
    quotient = QuotientAtPoint(x, 1, ((1, 4),))
    moved = transform_quotient(quotient, 2)
    assert moved.chart == 2
    results = []
    for src in ('2*x0 - x1', '3*x0 - x2', 'x1 + x2', '(2*x0 - x1)^2',
                'x2*(2*x0 - x1) + x0*(x1 + x2)', 'x1^2 + x0*x2'):
        f = parse(src, 3, gf5)
        results.append(eval_quotient_condition(quotient, f))
        assert eval_quotient_condition(moved, f) == results[-1]
    assert results[:4] == [True, True, False, False]


def test_quotient_condition_local_probability(gf2, plane, rational):
    condition = QuotientCondition(plane, SmoothnessQuotient(plane))
    x = rational(gf2, 1, 1, 1)
    assert condition.local_probability(x) == Fraction(7, 8)
    assert condition.width(x) == 3
    assert condition.applies(x)


def test_quotient_fiber_matrix_matches_jets(gf3, line_in_plane, rational):
    line = line_in_plane(gf3)
    condition = QuotientCondition(line, SmoothnessQuotient(line))
    x = rational(gf3, 0, 1, 2)
    exponents = monomials(3, 2)
    fiber = condition.fiber_matrix(np.array(exponents), x)
    assert fiber.shape == (6, 2)
    quotient = condition.quotient_at(x)
    for row, exp in zip(fiber.tolist(), exponents):
        value, gradient = taylor1_fiber(MPoly(gf3, 3, {exp: 1}), x)
        assert row[0] == value.value
        assert row[1:] == quotient.apply(gradient).tolist()


def test_constant_quotient(gf3, rational):
    X = Subscheme.projective_space(gf3, 2)
    special = ProjPoint(gf3, (1, 0, 0))
    provider = ConstantQuotient(gf3, [[1, 0]], per_point={special: [[0, 1]]})
    condition = QuotientCondition(X, provider)
    assert condition.quotient_at(rational(gf3, 1, 0, 0)).matrix == ((0, 1),)
    assert condition.quotient_at(rational(gf3, 1, 1, 0)).matrix == ((1, 0),)
    assert condition.ell == 1


def test_jet_condition(gf3, rational):
    x = rational(gf3, 1, 0, 0)
    zero = Jet(gf3, 2, 0, 2, (0, 0, 0))
    singular = JetCondition(x, 2, [zero])
    assert singular.local_probability(x) == Fraction(1, 27)
    assert singular.satisfied(parse('x1^2', 3, gf3), x)
    assert not singular.satisfied(parse('x0*x1', 3, gf3), x)
    smooth = JetCondition(x, 2, [zero], complement=True)
    assert smooth.local_probability(x) == Fraction(26, 27)
    assert smooth.satisfied(parse('x0*x1', 3, gf3), x)


def test_jet_condition_checks_the_point(gf3, rational):
    x = rational(gf3, 0, 1, 0)
    with pytest.raises(FieldMismatch):
        JetCondition(x, 2, [Jet(gf3, 2, 0, 2, (0, 0, 0))])
    with pytest.raises(FieldMismatch):
        eval_jet_condition(x, 2, [Jet(gf3, 1, 1, 2, (0,))], parse('x0', 3, gf3))


def test_restriction_to_Z(gf3, rational):
    z1, z2 = rational(gf3, 1, 0, 0), rational(gf3, 0, 1, 1)
    f = parse('x0 + 2*x1 + x2', 3, gf3)
    assert [v.value for v in restrict_to_Z(f, [z1, z2])] == [1, 0]
    assert [v.value for v in restrict_to_Z(f, [z2], charts=[2])] == [0]
    condition = RestrictionCondition([z1, z2], allowed=[(1, 0), (2, 0)])
    assert condition.h0_size == 9
    assert condition.local_probability == Fraction(2, 9)
    assert condition.satisfied(f)
    assert not condition.satisfied(parse('x1', 3, gf3))
    with pytest.raises(PreconditionViolated):
        RestrictionCondition([z2], charts=[0])


def test_conditions_skip_Z_and_jet_points(gf2, plane, rational):
    z = rational(gf2, 1, 0, 0)
    w = rational(gf2, 0, 1, 0)
    smooth = QuotientCondition(plane, SmoothnessQuotient(plane))
    jet = JetCondition(w, 2, [Jet(gf2, 2, 1, 2, (0, 0, 0))], complement=True)
    spec = TaylorConditionSpec([smooth, RestrictionCondition([z], allowed=[(1,)]), jet])
    assert spec.conditions_at(z) == []
    assert spec.conditions_at(w) == [jet]
    assert spec.conditions_at(rational(gf2, 1, 1, 1)) == [smooth]
    assert z not in spec.points(1)
    assert len(spec.points(1)) == 6
    assert spec.ell == 2


def test_spec_satisfied(gf2, plane):
    spec = TaylorConditionSpec([QuotientCondition(plane, SmoothnessQuotient(plane))])
    assert spec.satisfied(parse('x0', 3, gf2), 2)
    # x0*x1 is singular at (0:0:1)
    assert not spec.satisfied(parse('x0*x1', 3, gf2), 1)


def test_conic_provider_on_the_line(gf5, Y, line_in_plane, rational):
    U = line_in_plane(gf5, [(0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 4)])
    condition = QuotientCondition(U, ConicTangentQuotient(Y))
    x = rational(gf5, 0, 1, 3)
    assert condition.applies(x)
    assert not condition.applies(rational(gf5, 0, 1, 1))
    assert condition.quotient_at(x).ell == 1


def all_forms(ctx, d):
    """Every form of degree d over a prime field."""
    exponents = monomials(3, d)
    for coeffs in itertools.product(range(ctx.p), repeat=len(exponents)):
        yield MPoly(ctx, 3, dict(zip(exponents, coeffs)))


def test_condition_does_not_depend_on_the_orbit_member(plane, gf2):
    for x in closed_points_of_degree(plane, 2):
        conjugate = x.with_representative(1)
        assert conjugate.rep != x.rep
        here = smoothness_quotient(plane, x)
        there = smoothness_quotient(plane, conjugate)
        for f in all_forms(gf2, 2):
            assert eval_quotient_condition(here, f) == eval_quotient_condition(there, f)


@pytest.mark.parametrize('p, d', [(2, 2), (2, 3), (3, 2)])
def test_smoothness_matches_vanishing_partials(p, d, rational):
    X = Subscheme.projective_space(field_create(p), 2)
    ctx = X.base
    emb = build_embedding(ctx, ctx)
    points = [rational(ctx, *coords) for coords in
              itertools.product(range(p), repeat=3) if any(coords) and
              next(c for c in coords if c) == 1]
    assert len(points) == p ** 2 + p + 1
    quotients = [smoothness_quotient(X, x) for x in points]
    for f in all_forms(ctx, d):
        derivatives = [partial(f, i) for i in range(3)]
        for x, quotient in zip(points, quotients):
            coords = list(x.rep.coords)
            singular = all(evaluate(g, coords, emb) == ctx.zero for g in [f] + derivatives)
            assert eval_quotient_condition(quotient, f) == (not singular)


@pytest.mark.parametrize('degree', [1, 2])
def test_fraction_of_sections_with_zero_fiber_image(plane, degree):
    condition = QuotientCondition(plane, SmoothnessQuotient(plane))
    x = closed_points_of_degree(plane, degree)[-1]
    exponents = np.array(monomials(3, 3))
    fiber = condition.fiber_matrix(exponents, x)
    GF = x.field.GF
    sections = np.array(list(itertools.product(range(2), repeat=len(exponents))))
    images = np.asarray(GF(sections) @ GF(fiber))
    zero = int(np.all(images == 0, axis=1).sum())
    # q^(-(ell+1) deg x) of S_3 lands on zero
    assert Fraction(zero, len(sections)) == Fraction(1, 2 ** (3 * degree))
