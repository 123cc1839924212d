"""
    bertini_sieve.geom
    ~~~~~~~~~~~~~~~~~~

    Quasiprojective subschemes of P^n over F_q, their points over extension
    fields, closed points as Frobenius orbits, and truncated zeta products.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from sympy import divisors, mobius

from . import enumeration_budget
from .exceptions import (BudgetExceeded, FieldMismatch, InternalError,
                         PreconditionViolated)
from .gf import FqElem, as_ints, build_embedding, relative_table
from .mpoly import evaluate_many
from .runner import Runner

logger = logging.getLogger('bertini_sieve')


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^n over ``field``, first nonzero coordinate equal to 1.

    ``values`` holds the coordinate encodings; build points with
    :meth:`normalized` unless the values are already normalized.
    """

    field: object
    values: tuple

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, 'values', values)
        nonzero = [v for v in values if v]
        if not nonzero:
            raise PreconditionViolated('all coordinates of a projective point are zero')
        if nonzero[0] != 1:
            raise PreconditionViolated(f'{values} is not normalized')

    @classmethod
    def normalized(cls, field, values):
        values = [v.value if isinstance(v, FqElem) else int(v) for v in values]
        lead = next((v for v in values if v), 0)
        if not lead:
            raise PreconditionViolated('all coordinates of a projective point are zero')
        scale = field.inv(lead)
        return cls(field, tuple(field.mul(v, scale) for v in values))

    @property
    def n(self):
        return len(self.values) - 1

    @property
    def coords(self):
        return tuple(FqElem(self.field, v) for v in self.values)

    @property
    def chart(self):
        """Index of the first nonzero coordinate."""
        return next(i for i, v in enumerate(self.values) if v)

    def in_chart(self, j):
        """Coordinates rescaled so that coordinate ``j`` is 1."""
        if not self.values[j]:
            raise PreconditionViolated(f'coordinate x{j} vanishes at {self}')
        scale = self.field.inv(self.values[j])
        return [FqElem(self.field, self.field.mul(v, scale)) for v in self.values]

    def frobenius(self, q):
        """The conjugate point with every coordinate raised to ``q``."""
        return ProjPoint(self.field, tuple(self.field.power(v, q) for v in self.values))

    def embed(self, emb):
        if emb.source != self.field:
            raise FieldMismatch(f'{self} is not defined over {emb.source}')
        return ProjPoint(emb.target, tuple(int(v) for v in emb.apply_ints(self.values)))

    @property
    def sort_key(self):
        return tuple(int(k) for k in self.field.lex_keys(self.values))

    def to_json(self):
        return [list(c.coeffs) for c in self.coords]

    def __str__(self):
        if self.field.k == 1:
            return '(' + ':'.join(str(v) for v in self.values) + ')'
        return '(' + ':'.join(str(c) for c in self.coords) + ')'


class Subscheme:
    """The locally closed subscheme of P^n cut out by membership predicates.

    A point belongs to it iff every equation vanishes there, no non-equation
    does, and it does not lie on one of the excluded closed points.

    :param base: the field F_q
    :param n: ambient projective dimension
    :param equations: homogeneous :class:`~bertini_sieve.mpoly.MPoly` in n+1 variables
    :param non_equations: homogeneous polynomials that must not vanish
    :param excluded: closed points to remove, as :class:`ClosedPoint` or as a
                     :class:`ProjPoint` over the residue field of one
    :param dimension: the declared dimension m; defaults to n minus the number
                      of equations
    :param name: label used in reports
    """

    def __init__(self, base, n, equations=(), non_equations=(), excluded=(),
                 dimension=None, name=None):
        self.base = base
        self.n = n
        for poly in list(equations) + list(non_equations):
            if poly.ctx != base:
                raise FieldMismatch(f'{poly} is not defined over {base}')
            if poly.nvars != n + 1:
                raise PreconditionViolated(f'{poly} is not a polynomial in {n + 1} variables')
            if not poly.is_homogeneous():
                raise PreconditionViolated(f'{poly} is not homogeneous')
        self.equations = tuple(equations)
        self.non_equations = tuple(non_equations)
        points = set()
        for point in excluded:
            if isinstance(point, ProjPoint):
                point = closed_point_of(base, point)
            if point.base != base or point.rep.n != n:
                raise PreconditionViolated(
                    f'excluded point {point} is not a closed point of P^{n} over {base}')
            points.add(point)
        self.excluded = tuple(sorted(points, key=lambda z: z.sort_key))
        if dimension is None:
            dimension = max(n - len(self.equations), 0)
            if self.equations:
                logger.warning('Dimension of %s not declared, assuming %s', self, dimension)
        self.dimension = dimension
        self.name = name

    @classmethod
    def projective_space(cls, base, n):
        return cls(base, n, dimension=n, name=f'P^{n}')

    def __repr__(self):
        if self.name:
            return self.name
        return (f'Subscheme(P^{self.n} over {self.base!r}, {len(self.equations)} equations, '
                f'{len(self.non_equations)} non-equations, {len(self.excluded)} excluded)')

    @property
    def q(self):
        return self.base.q

    # linear span

    def is_linear(self):
        """True when every equation is linear and nothing else restricts the points."""
        return not self.non_equations and all(eq.degree <= 1 for eq in self.equations) \
            and not any(eq.degree == 0 for eq in self.equations)

    @cached_property
    def span(self):
        """Row-reduced basis of the linear subspace cut out by the linear equations.

        Shape ``(k+1, n+1)``; ``k == -1`` means the linear equations have no
        common projective zero.
        """
        GF = self.base.GF
        linear = [eq.coefficient_vector(1) for eq in self.equations if eq.degree == 1]
        if not linear:
            return as_ints(GF.Identity(self.n + 1))
        kernel = GF(np.array(linear)).null_space()
        if kernel.shape[0] == 0:
            return np.zeros((0, self.n + 1), dtype=np.int64)
        return as_ints(kernel.row_reduce())

    @property
    def span_dimension(self):
        return self.span.shape[0] - 1

    @cached_property
    def pivots(self):
        return np.array([int(np.flatnonzero(row)[0]) for row in self.span], dtype=np.int64)

    def removed_points(self):
        """Excluded closed points that would otherwise belong to the scheme."""
        return tuple(z for z in self.excluded
                     if self._satisfies(np.array([z.rep.values]), z.embedding)[0])

    def removed_count(self, r):
        """Points over F_{q^r} taken away by the exclusions."""
        return sum(z.degree for z in self.removed_points() if r % z.degree == 0)

    # membership

    def _satisfies(self, rows, emb):
        mask = np.ones(rows.shape[0], dtype=bool)
        for eq in self.equations:
            mask &= evaluate_many(eq, rows, emb) == 0
        for neq in self.non_equations:
            mask &= evaluate_many(neq, rows, emb) != 0
        return mask

    def member_mask(self, rows, emb):
        """Membership of normalized points given as rows of encodings over ``emb.target``."""
        rows = np.asarray(rows, dtype=np.int64)
        mask = self._satisfies(rows, emb)
        r = emb.degree
        for z in self.excluded:
            if r % z.degree:
                continue
            table = relative_table(self.base, z.field, emb.target)
            for member in z.orbit:
                image = table[np.asarray(member.values, dtype=np.int64)]
                mask &= ~np.all(rows == image, axis=1)
        return mask

    def contains(self, point):
        emb = build_embedding(self.base, point.field)
        return bool(self.member_mask(np.array([point.values]), emb)[0])


def _lex_sorted(rows, ctx):
    if rows.shape[0] == 0:
        return rows
    keys = ctx.lex_keys(rows)
    order = np.lexsort([keys[:, i] for i in reversed(range(rows.shape[1]))])
    return rows[order]


def _lex_less(a, b):
    """Row-wise lexicographic ``a < b`` on arrays of lex keys."""
    less = np.zeros(a.shape[0], dtype=bool)
    equal = np.ones(a.shape[0], dtype=bool)
    for col in range(a.shape[1]):
        less |= equal & (a[:, col] < b[:, col])
        equal &= a[:, col] == b[:, col]
    return less


@lru_cache(maxsize=64)
def point_array(X, r, threads=None):
    """``X(F_{q^r})`` as a lex-sorted ``(N, n+1)`` array of encodings.

    Points are produced as combinations of the row-reduced span basis with a
    normalized coefficient vector, so each row comes out normalized.
    """
    if r < 1:
        raise PreconditionViolated(f'extension degree must be positive, got {r}')
    K = X.base.extension(r)
    emb = build_embedding(X.base, K)
    k = X.span_dimension
    if k < 0:
        return K, np.zeros((0, X.n + 1), dtype=np.int64)
    Q = K.q
    budget = enumeration_budget()
    if Q ** (k + 1) > budget:
        raise BudgetExceeded(f'enumerating {X} over GF({Q}) needs {Q}^{k + 1} candidates, '
                             f'budget is {budget}')
    basis = K.GF(emb.apply_ints(X.span))
    runner = Runner(threads=threads)
    found = []
    for lead in range(k + 1):
        tail = k - lead
        weights = Q ** np.arange(tail - 1, -1, -1, dtype=np.int64)

        def chunk(start, stop, lead=lead, tail=tail, weights=weights):
            index = np.arange(start, stop, dtype=np.int64)
            u = np.zeros((index.size, k + 1), dtype=np.int64)
            u[:, lead] = 1
            if tail:
                u[:, lead + 1:] = (index[:, None] // weights) % Q
            rows = as_ints(K.GF(u) @ basis)
            return rows[X.member_mask(rows, emb)]

        found.extend(runner.map(chunk, Q ** tail))
    rows = np.concatenate(found) if found else np.zeros((0, X.n + 1), dtype=np.int64)
    logger.debug('%s has %s points over GF(%s)', X, rows.shape[0], Q)
    return K, _lex_sorted(rows, K)


def enumerate_points(X, r, threads=None):
    """All normalized points of X over F_{q^r}, in lex order."""
    K, rows = point_array(X, r, threads)
    return [ProjPoint(K, tuple(row)) for row in rows]


def count_points(X, r, threads=None):
    """N_r = #X(F_{q^r}); closed form for linear spaces minus closed points."""
    if X.is_linear():
        k = X.span_dimension
        if k < 0:
            return 0
        Q = X.q ** r
        return (Q ** (k + 1) - 1) // (Q - 1) - X.removed_count(r)
    return point_array(X, r, threads)[1].shape[0]


@dataclass(frozen=True)
class ClosedPoint:
    """A Frobenius orbit of ``degree`` points; ``rep`` is the lex-smallest member."""

    rep: ProjPoint
    degree: int
    base: object
    parent: object = field(default=None, compare=False, repr=False)

    @property
    def field(self):
        """The residue field, GF(q^degree)."""
        return self.rep.field

    @property
    def embedding(self):
        return build_embedding(self.base, self.rep.field)

    @property
    def chart(self):
        return self.rep.chart

    @cached_property
    def orbit(self):
        points = [self.rep]
        for _ in range(self.degree - 1):
            points.append(points[-1].frobenius(self.base.q))
        return tuple(points)

    def with_representative(self, index):
        """The same closed point seen through another orbit member."""
        return ClosedPoint(self.orbit[index % self.degree], self.degree, self.base, self.parent)

    @property
    def sort_key(self):
        return (self.degree, self.rep.sort_key)

    def __str__(self):
        return f'{self.rep} [deg {self.degree}]'


def closed_point_of(base, point, parent=None):
    """The closed point through ``point``, which must have exact degree
    ``[point.field : base]``."""
    if point.field.p != base.p or point.field.k % base.k:
        raise FieldMismatch(f'{point} is not defined over an extension of {base}')
    r = point.field.k // base.k
    orbit = [point]
    for _ in range(r - 1):
        orbit.append(orbit[-1].frobenius(base.q))
    if len(set(orbit)) != r:
        raise PreconditionViolated(f'{point} is defined over a smaller field than {point.field}')
    rep = min(orbit, key=lambda pt: pt.sort_key)
    return ClosedPoint(rep, r, base, parent)


def _frobenius_rows(K, rows, q):
    return as_ints(K.GF(rows) ** q)


def closed_points_of_degree(X, r, threads=None):
    """Closed points of X of degree exactly ``r``, in lex order of representatives."""
    K, rows = point_array(X, r, threads)
    if rows.shape[0] == 0:
        return []
    q = X.q
    k = X.span_dimension
    weights = K.q ** np.arange(k, -1, -1, dtype=np.int64)

    def ids(array):
        return array[:, X.pivots] @ weights

    known = np.sort(ids(rows))
    keys = K.lex_keys(rows)
    minimal = np.ones(rows.shape[0], dtype=bool)
    exact = np.ones(rows.shape[0], dtype=bool)
    image = rows
    for j in range(1, r + 1):
        image = _frobenius_rows(K, image, q)
        if j == 1:
            found = np.searchsorted(known, ids(image))
            found = np.minimum(found, known.size - 1)
            if not np.all(known[found] == ids(image)):
                raise InternalError(f'{X} is not stable under Frobenius over GF({K.q})')
        fixed = np.all(image == rows, axis=1)
        if j < r:
            exact &= ~fixed
            minimal &= ~_lex_less(K.lex_keys(image), keys)
        elif not np.all(fixed):
            raise InternalError(f'Frobenius^{r} moved a point of {X} over GF({K.q})')
    chosen = rows[exact & minimal]
    count = int(exact.sum())
    if count != r * chosen.shape[0]:
        raise InternalError(f'{count} points of exact degree {r} do not form orbits of size {r}')
    return [ClosedPoint(ProjPoint(K, tuple(row)), r, X.base, X) for row in chosen]


def closed_points(X, E, threads=None):
    """Closed points of degree at most ``E``, sorted by (degree, representative)."""
    if E < 1:
        raise PreconditionViolated(f'degree cutoff must be positive, got {E}')
    points = []
    for r in range(1, E + 1):
        batch = closed_points_of_degree(X, r, threads)
        logger.debug('%s: %s closed points of degree %s', X, len(batch), r)
        points.extend(batch)
    return points


def closed_point_counts_moebius(X, E, threads=None):
    """``[(r, c_r)]`` for r <= E by Möbius inversion of the point counts."""
    if E < 1:
        raise PreconditionViolated(f'degree cutoff must be positive, got {E}')
    N = {r: count_points(X, r, threads) for r in range(1, E + 1)}
    counts = []
    for r in range(1, E + 1):
        total = sum(int(mobius(r // d)) * N[d] for d in divisors(r))
        if total % r:
            raise InternalError(f'Möbius sum {total} at degree {r} is not divisible by {r}')
        counts.append((r, total // r))
    return counts


@dataclass
class ZetaTruncation:
    """``value`` is the product of (1 - q^(-s*deg x)) over closed points of degree <= E.

    ``per_degree`` lists ``(r, c_r, partial product up to r)``.
    """

    s: int
    E: int
    q: int
    value: Fraction
    per_degree: list
    closed_form: Fraction = None
    tail_bound: float = None
    dimension: int = None

    def to_json(self):
        return {
            's': self.s,
            'E': self.E,
            'value': str(self.value),
            'closed_form': None if self.closed_form is None else str(self.closed_form),
            'tail_bound': self.tail_bound,
            'per_degree': [[r, c, str(partial)] for r, c, partial in self.per_degree],
        }


def euler_factor(q, s, degree):
    return 1 - Fraction(1, q ** (s * degree))


def closed_form_zeta_inverse(X, s):
    """Exact ζ_X(s)^{-1} for a linear space minus closed points, else ``None``."""
    if not X.is_linear():
        return None
    k = X.span_dimension
    if k < 0:
        return Fraction(1)
    if s <= k:
        return None
    q = X.q
    value = Fraction(1)
    for i in range(k + 1):
        value *= 1 - Fraction(q ** i, q ** s)
    return value / zeta_inverse_of_points(X.removed_points(), s)


def tail_bound(counts, q, s, m):
    """Bound on the mass of the Euler factors beyond the last degree in ``counts``.

    Uses c_r <= C q^(r m) / r with C measured on the given counts.
    """
    if s <= m or not counts:
        return None
    E = counts[-1][0]
    C = max(r * c / q ** (r * m) for r, c in counts)
    ratio = q ** (m - s)
    return C * q ** ((E + 1) * (m - s)) / ((E + 1) * (1 - ratio))


def zeta_inverse_truncated(X, s, E, threads=None):
    """The Euler product of X at ``s`` truncated to closed points of degree <= E."""
    if s < 1:
        raise PreconditionViolated(f'zeta argument must be positive, got {s}')
    if s <= X.dimension:
        logger.warning('Euler product of %s at s=%s diverges (dimension %s)', X, s, X.dimension)
    counts = closed_point_counts_moebius(X, E, threads)
    value = Fraction(1)
    per_degree = []
    for r, c in counts:
        value *= euler_factor(X.q, s, r) ** c
        per_degree.append((r, c, value))
    return ZetaTruncation(
        s=s, E=E, q=X.q, value=value, per_degree=per_degree,
        closed_form=closed_form_zeta_inverse(X, s),
        tail_bound=tail_bound(counts, X.q, s, X.dimension),
        dimension=X.dimension,
    )


def zeta_inverse_of_points(points, s):
    """ζ_Z(s)^{-1} of a finite set of closed points."""
    value = Fraction(1)
    for x in points:
        value *= euler_factor(x.base.q, s, x.degree)
    return value
