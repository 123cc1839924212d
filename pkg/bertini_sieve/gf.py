"""
    bertini_sieve.gf
    ~~~~~~~~~~~~~~~~

    Finite fields GF(p^k), their elements, Frobenius and field embeddings.

    Every field is a single extension of its prime field. An element is encoded
    by the integer ``c0 + c1*p + ... + c(k-1)*p**(k-1)`` where ``(c0, ..., c(k-1))``
    is its coefficient vector in the power basis of the modulus root ``t``; this is
    also the integer representation used by :mod:`galois`, so arrays of encodings
    convert to field arrays for free.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import galois
import numpy as np
from sympy import factorint, isprime

from .exceptions import FieldMismatch, InternalError, PreconditionViolated

logger = logging.getLogger('bertini_sieve')


def as_ints(array):
    """Return the integer encodings of a galois array as a plain int64 array."""
    return np.asarray(array.view(np.ndarray), dtype=np.int64)


class FieldCtx:
    """The field GF(p^k) together with its modulus.

    Use :func:`field_create` rather than instantiating this directly; it picks
    the modulus deterministically and verifies it.

    :param p: the characteristic
    :param k: degree over the prime field
    :param modulus: monic irreducible :class:`galois.Poly` of degree ``k``
                    over GF(p); ``x`` when ``k == 1``
    """

    def __init__(self, p, k, modulus):
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = modulus
        if k == 1:
            self.GF = galois.GF(p)
        else:
            self.GF = galois.GF(p ** k, irreducible_poly=modulus)

    @classmethod
    def from_order(cls, q):
        """The field with ``q`` elements, ``q`` a prime power."""
        factors = factorint(q) if q > 1 else {}
        if len(factors) != 1:
            raise PreconditionViolated(f'{q} is not a prime power')
        (p, k), = factors.items()
        return field_create(int(p), int(k))

    @cached_property
    def modulus_coeffs(self):
        """Little-endian coefficients of the modulus."""
        return tuple(int(c) for c in as_ints(self.modulus.coeffs)[::-1])

    def __eq__(self, other):
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self.p, self.k, self.modulus_coeffs) == \
            (other.p, other.k, other.modulus_coeffs)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus_coeffs))

    def __repr__(self):
        if self.k == 1:
            return f'GF({self.p})'
        return f'GF({self.p}^{self.k})'

    def to_json(self):
        return {'p': self.p, 'k': self.k, 'modulus': list(self.modulus_coeffs)}

    def extension(self, r):
        """GF(p^(k*r)), the degree ``r`` extension of this field."""
        return field_create(self.p, self.k * r)

    # element construction

    def element(self, value):
        value = int(value)
        if not 0 <= value < self.q:
            raise PreconditionViolated(f'{value} does not encode an element of {self}')
        return FqElem(self, value)

    def lift(self, n):
        """Image of the integer ``n`` in the prime field."""
        return FqElem(self, int(n) % self.p)

    def from_coeffs(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > self.k or any(not 0 <= c < self.p for c in coeffs):
            raise PreconditionViolated(f'{coeffs} is not a coefficient vector of {self}')
        return FqElem(self, sum(c * self.p ** i for i, c in enumerate(coeffs)))

    @property
    def zero(self):
        return FqElem(self, 0)

    @property
    def one(self):
        return FqElem(self, 1)

    @property
    def generator(self):
        """The modulus root ``t``; the constant 1 for a prime field."""
        return FqElem(self, self.p if self.k > 1 else 1)

    def elements(self):
        return [FqElem(self, v) for v in range(self.q)]

    # vectorized encodings

    def digits(self, values):
        """Little-endian coefficient vectors, shape ``values.shape + (k,)``."""
        values = np.asarray(values, dtype=np.int64)
        return (values[..., None] // self.p ** np.arange(self.k)) % self.p

    def from_digits(self, digits):
        digits = np.asarray(digits, dtype=np.int64)
        return (digits * self.p ** np.arange(self.k)).sum(axis=-1)

    def lex_keys(self, values):
        """Integers ordering encodings lexicographically by coefficient vector."""
        values = np.asarray(values, dtype=np.int64)
        key = np.zeros_like(values)
        for i in range(self.k):
            key = key * self.p + (values // self.p ** i) % self.p
        return key

    @cached_property
    def lex_order(self):
        """All encodings sorted by coefficient vector."""
        values = np.arange(self.q, dtype=np.int64)
        return values[np.argsort(self.lex_keys(values), kind='stable')]

    # scalar arithmetic on encodings

    def add(self, a, b):
        return int(self.GF(a) + self.GF(b))

    def sub(self, a, b):
        return int(self.GF(a) - self.GF(b))

    def mul(self, a, b):
        return int(self.GF(a) * self.GF(b))

    def neg(self, a):
        return int(-self.GF(a))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f'inverse of zero in {self}')
        return int(np.reciprocal(self.GF(a)))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        return int(self.GF(a) ** e)

    def scale(self, a, n):
        """``a`` times the integer ``n``."""
        return self.mul(a, int(n) % self.p)


@dataclass(frozen=True)
class FqElem:
    """An element of ``ctx``; ``value`` is its integer encoding."""

    ctx: FieldCtx
    value: int

    @property
    def coeffs(self):
        return tuple(int(c) for c in self.ctx.digits(self.value))

    def is_zero(self):
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.ctx != self.ctx:
                raise FieldMismatch(f'{self.ctx} and {other.ctx} do not match')
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FqElem(self.ctx, self.ctx.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FqElem(self.ctx, self.ctx.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FqElem(self.ctx, self.ctx.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FqElem(self.ctx, self.ctx.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FqElem(self.ctx, self.ctx.div(self.value, b))

    def __neg__(self):
        return FqElem(self.ctx, self.ctx.neg(self.value))

    def __pow__(self, e):
        return FqElem(self.ctx, self.ctx.power(self.value, int(e)))

    def inverse(self):
        return FqElem(self.ctx, self.ctx.inv(self.value))

    def to_json(self):
        return list(self.coeffs)

    def __str__(self):
        return '[' + ','.join(str(c) for c in self.coeffs) + ']'

    def __repr__(self):
        return f'FqElem({self} in {self.ctx!r})'


def _verify_irreducible(modulus, p, k):
    """Raise unless ``modulus`` shares no factor with x^(p^i) - x, i <= k/2."""
    prime_field = galois.GF(p)
    x = galois.Poly([1, 0], field=prime_field)
    if modulus.degree != k or int(modulus.coeffs[0]) != 1:
        raise InternalError(f'{modulus} is not monic of degree {k}')
    for i in range(1, k // 2 + 1):
        h = pow(x, p ** i, modulus) - x
        if galois.gcd(modulus, h).degree != 0:
            raise InternalError(f'{modulus} is reducible over GF({p})')


@lru_cache(maxsize=None)
def field_create(p, k=1):
    """Create GF(p^k) with the first monic irreducible modulus in galois's ``min`` order.

    That order compares coefficient vectors from the leading term down, so
    GF(16) gets x^4 + x + 1. Elements themselves are ordered little-endian by
    :meth:`FieldCtx.lex_keys`.

    :param p: a prime
    :param k: extension degree, ``k >= 1``
    """
    if int(p) != p or not isprime(int(p)):
        raise PreconditionViolated(f'{p} is not prime')
    if int(k) != k or k < 1:
        raise PreconditionViolated(f'extension degree must be positive, got {k}')
    p, k = int(p), int(k)
    if k == 1:
        modulus = galois.Poly([1, 0], field=galois.GF(p))
    else:
        modulus = galois.irreducible_poly(p, k, method='min')
    _verify_irreducible(modulus, p, k)
    logger.debug('Created GF(%s^%s) with modulus %s', p, k, modulus)
    return FieldCtx(p, k, modulus)


_OPS = {
    'add': FqElem.__add__,
    'sub': FqElem.__sub__,
    'mul': FqElem.__mul__,
    'div': FqElem.__truediv__,
}


def arith(a, b, op):
    """``a op b`` for ``op`` in add, sub, mul, div."""
    if op not in _OPS:
        raise PreconditionViolated(f'unknown operation {op!r}')
    if a.ctx != b.ctx:
        raise FieldMismatch(f'{a.ctx} and {b.ctx} do not match')
    return _OPS[op](a, b)


def inv(a):
    return a.inverse()


def power(a, e):
    return a ** e


def frobenius(a, s=1):
    """``a ** (p**s)``, the Frobenius relative to GF(p^s)."""
    if s < 1 or a.ctx.k % s:
        raise PreconditionViolated(f'{s} does not divide {a.ctx.k}')
    return a ** (a.ctx.p ** s)


@dataclass(frozen=True)
class Embedding:
    """The embedding GF(p^s) -> GF(p^(s*r)) sending ``t`` to ``image_of_generator``."""

    source: FieldCtx
    target: FieldCtx
    image_of_generator: FqElem

    @property
    def degree(self):
        """``r``, the degree of the target over the source."""
        return self.target.k // self.source.k

    @cached_property
    def table(self):
        """Encoding of the image of every source element, indexed by encoding."""
        T = self.target.GF
        digits = self.source.digits(np.arange(self.source.q))
        g = T(self.image_of_generator.value)
        image = T.Zeros(self.source.q)
        for i in range(self.source.k):
            image = image + T(digits[:, i]) * g ** i
        return as_ints(image)

    def apply(self, a):
        if a.ctx != self.source:
            raise FieldMismatch(f'{a.ctx} is not the source {self.source}')
        return FqElem(self.target, int(self.table[a.value]))

    def apply_ints(self, values):
        return self.table[np.asarray(values, dtype=np.int64)]

    @cached_property
    def _inverse_basis(self):
        # GF(p)-basis u^i * beta^j of the target, row index j*s + i
        s, m = self.source.k, self.target.k
        T = self.target.GF
        beta = T(self.target.p if m > 1 else 1)
        u_images = self.table[self.source.p ** np.arange(s)]
        rows = [T(int(u_images[i])) * beta ** j
                for j in range(self.degree) for i in range(s)]
        basis = galois.GF(self.target.p)(self.target.digits([int(b) for b in rows]))
        return np.linalg.inv(basis)

    def coordinates(self, values):
        """Restriction of scalars.

        Returns the source-field encodings ``c_j`` with
        ``y = sum(phi(c_j) * beta**j)``, ``beta`` the target generator, shape
        ``values.shape + (r,)``.
        """
        values = np.asarray(values, dtype=np.int64)
        s, m = self.source.k, self.target.k
        Fp = galois.GF(self.target.p)
        vec = Fp(self.target.digits(values.reshape(-1)).reshape(-1, m))
        a = as_ints(vec @ self._inverse_basis)
        a = a.reshape(values.shape + (self.degree, s))
        return (a * self.source.p ** np.arange(s)).sum(axis=-1)

    def verify(self, samples=64):
        """Check additivity and multiplicativity on a deterministic sample."""
        S, T = self.source.GF, self.target.GF
        a = np.arange(self.source.q, dtype=np.int64)[:samples]
        b = (a * 7 + 3) % self.source.q
        lhs_add = T(self.table[as_ints(S(a) + S(b))])
        rhs_add = T(self.table[a]) + T(self.table[b])
        lhs_mul = T(self.table[as_ints(S(a) * S(b))])
        rhs_mul = T(self.table[a]) * T(self.table[b])
        if not (np.all(lhs_add == rhs_add) and np.all(lhs_mul == rhs_mul)):
            raise InternalError(f'{self} is not a ring homomorphism')
        return True

    def __repr__(self):
        return f'Embedding({self.source!r} -> {self.target!r}, t -> {self.image_of_generator})'


@lru_cache(maxsize=None)
def build_embedding(source, target):
    """Deterministic embedding of ``source`` into ``target``.

    The generator goes to the lexicographically smallest root of the source
    modulus; a field embeds into itself by the identity. Embeddings out of a
    prime field compose along towers; for other sources the composite through
    an intermediate field may differ from the direct one by a Frobenius power
    (see :func:`relative_table`).
    """
    if source.p != target.p or target.k % source.k:
        raise PreconditionViolated(f'{source} does not embed into {target}')
    if source == target:
        image = target.generator.value
    elif source.k == 1:
        image = 1
    else:
        poly = galois.Poly(as_ints(source.modulus.coeffs), field=target.GF)
        roots = as_ints(poly.roots())
        if not roots.size:
            raise InternalError(f'{source.modulus} has no root in {target}')
        image = int(roots[np.argmin(target.lex_keys(roots))])
    embedding = Embedding(source, target, FqElem(target, int(image)))
    embedding.verify()
    return embedding


@lru_cache(maxsize=None)
def relative_table(base, source, target):
    """Images of the ``source`` encodings in ``target`` under an embedding over ``base``.

    The result restricts to ``build_embedding(base, target)`` on the image of
    ``base`` in ``source``; it is the fixed embedding composed with the first
    Frobenius power that achieves this.
    """
    table = build_embedding(source, target).table
    wanted = build_embedding(base, target).table
    through = table[build_embedding(base, source).table]
    GF = target.GF
    for j in range(target.k):
        e = target.p ** j
        if np.array_equal(as_ints(GF(through) ** e), wanted):
            return as_ints(GF(table) ** e)
    raise InternalError(f'no embedding of {source} into {target} over {base}')
