import itertools

import numpy as np
import pytest

from bertini_sieve.exceptions import FieldMismatch, PreconditionViolated
from bertini_sieve.gf import (FieldCtx, arith, build_embedding, field_create,
                              frobenius, inv, power, relative_table)

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def test_field_create_picks_smallest_modulus(gf4):
    assert (gf4.p, gf4.k, gf4.q) == (2, 2, 4)
    assert gf4.modulus_coeffs == (1, 1, 1)
    assert field_create(2, 2) is gf4


def test_field_create_rejects_bad_input():
    with pytest.raises(PreconditionViolated):
        field_create(4)
    with pytest.raises(PreconditionViolated):
        field_create(3, 0)


def test_from_order():
    gf9 = FieldCtx.from_order(9)
    assert (gf9.p, gf9.k) == (3, 2)
    with pytest.raises(PreconditionViolated):
        FieldCtx.from_order(6)


def test_generator_arithmetic(gf4):
    t = gf4.generator
    assert t.value == 2
    assert (t * t).value == 3
    assert t ** 3 == gf4.one
    assert (t + t) == gf4.zero
    assert arith(t, t + 1, 'mul') == gf4.one
    assert inv(t).value == 3
    assert power(t, -1) == inv(t)


def test_inverse_of_zero(gf5):
    with pytest.raises(ZeroDivisionError):
        inv(gf5.zero)
    with pytest.raises(ZeroDivisionError):
        gf5.one / 0


def test_every_nonzero_element_is_invertible(gf4):
    for a in gf4.elements()[1:]:
        assert a * a.inverse() == gf4.one


def test_mismatched_fields(gf2, gf4):
    with pytest.raises(FieldMismatch):
        arith(gf2.one, gf4.one, 'add')
    with pytest.raises(PreconditionViolated):
        arith(gf4.one, gf4.one, 'pow')


def test_frobenius(gf4):
    t = gf4.generator
    assert frobenius(t).value == 3
    assert frobenius(frobenius(t)) == t
    assert frobenius(t, 2) == t
    with pytest.raises(PreconditionViolated):
        frobenius(t, 3)


def test_lex_order(gf4):
    assert gf4.lex_order.tolist() == [0, 2, 1, 3]
    assert gf4.digits([3, 2]).tolist() == [[1, 1], [0, 1]]
    assert gf4.from_digits([[0, 1]]).tolist() == [2]


def test_prime_field_embedding(gf2, gf4):
    emb = build_embedding(gf2, gf4)
    assert emb.degree == 2
    assert emb.table.tolist() == [0, 1]
    assert emb.coordinates(np.arange(4)).tolist() == [[0, 0], [1, 0], [0, 1], [1, 1]]


def test_extension_embedding_sends_generator_to_a_root(gf4):
    gf16 = gf4.extension(2)
    emb = build_embedding(gf4, gf16)
    g = emb.apply(gf4.generator)
    assert g * g + g + 1 == gf16.zero
    assert emb.verify()
    assert build_embedding(gf4, gf16) is emb


def test_coordinates_recover_the_element(gf4):
    gf16 = gf4.extension(2)
    emb = build_embedding(gf4, gf16)
    beta = gf16.generator
    values = np.arange(16)
    coords = emb.coordinates(values)
    assert coords.shape == (16, 2)
    for y, (c0, c1) in zip(values, coords.tolist()):
        rebuilt = emb.apply(gf4.element(c0)) + emb.apply(gf4.element(c1)) * beta
        assert rebuilt.value == y


def test_embedding_requires_divisibility(gf4):
    with pytest.raises(PreconditionViolated):
        build_embedding(gf4, field_create(2, 3))


def test_modulus_order_of_gf16():
    # x^4 + x + 1, not x^4 + x^3 + 1
    assert field_create(2, 4).modulus_coeffs == (1, 1, 0, 0, 1)


@pytest.mark.parametrize('q', SMALL_ORDERS)
def test_field_axioms(q):
    F = FieldCtx.from_order(q)
    elements = F.elements()
    for a, b, c in itertools.product(elements, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a, b in itertools.product(elements, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
        assert a - b + b == a
    for a in elements[1:]:
        assert a * inv(a) == F.one


@pytest.mark.parametrize('q', [2, 3, 4, 5, 8, 9, 16, 25, 27, 32, 49, 64, 81])
def test_every_element_is_fixed_by_the_full_frobenius(q):
    F = FieldCtx.from_order(q)
    for a in F.elements():
        assert power(a, q) == a
        assert frobenius(a, F.k) == a


@pytest.mark.parametrize('q', [4, 8, 9, 16, 27, 64, 81])
def test_relative_frobenius_fixes_the_subfield(q):
    F = FieldCtx.from_order(q)
    for s in range(1, F.k + 1):
        if F.k % s:
            continue
        fixed = [a for a in F.elements() if frobenius(a, s) == a]
        assert len(fixed) == F.p ** s


@pytest.mark.parametrize('q', [2, 4, 9, 16])
def test_self_embedding_is_the_identity(q):
    F = FieldCtx.from_order(q)
    emb = build_embedding(F, F)
    assert emb.table.tolist() == list(range(q))
    assert emb.coordinates(np.arange(q)).reshape(-1).tolist() == list(range(q))


def test_prime_field_embeddings_compose(gf2):
    gf4, gf16 = gf2.extension(2), gf2.extension(4)
    direct = build_embedding(gf2, gf16).table
    composite = build_embedding(gf4, gf16).table[build_embedding(gf2, gf4).table]
    assert composite.tolist() == direct.tolist()


def test_tower_composite_is_a_conjugate_of_the_direct_embedding(gf4):
    gf16, gf256 = gf4.extension(2), gf4.extension(4)
    direct = build_embedding(gf4, gf256).table
    composite = build_embedding(gf16, gf256).table[build_embedding(gf4, gf16).table]
    GF = gf256.GF
    conjugates = [(GF(direct) ** (2 ** j)).tolist() for j in range(gf256.k)]
    assert composite.tolist() in conjugates
    # an embedding over GF(4) always exists and agrees with the direct one
    over = relative_table(gf4, gf16, gf256)
    assert over[build_embedding(gf4, gf16).table].tolist() == direct.tolist()
