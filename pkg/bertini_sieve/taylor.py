"""
    bertini_sieve.taylor
    ~~~~~~~~~~~~~~~~~~~~

    Taylor conditions on sections f of O(d), read on fibers at closed points.

    A quotient condition asks that (f(x), Q . grad f(x)) does not vanish in
    κ(x)^(ℓ+1), where Q is the fiber at x of a rank ℓ quotient of the cotangent
    bundle. Jet conditions prescribe the jet of f at finitely many points, and
    restriction conditions prescribe the values of f on a finite subscheme Z.
    All values are read in an affine chart after the x_j^(-d) normalization.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce

import numpy as np

from .exceptions import (FieldMismatch, GeneralPositionError,
                         PreconditionViolated, SingularPoint)
from .geom import closed_points
from .gf import FqElem, as_ints, build_embedding
from .mpoly import (MPoly, jet_at, jet_exponents, local_jet,
                    monomial_jet_matrix, monomials)

logger = logging.getLogger('bertini_sieve')


def _rank(field, rows):
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return 0
    return int(np.linalg.matrix_rank(field.GF(rows)))


def _normalize_vector(field, values):
    """Scale so the first nonzero entry is 1."""
    values = [int(v) for v in values]
    lead = next(v for v in values if v)
    scale = field.inv(lead)
    return tuple(field.mul(v, scale) for v in values)


@dataclass(frozen=True)
class QuotientAtPoint:
    """Fiber at ``point`` of a rank ``ell`` quotient of the cotangent bundle.

    ``matrix`` is ``ell x n`` over κ(x), acting on gradients read in ``chart``.
    """

    point: object
    ell: int
    matrix: tuple
    chart: int = None

    def __post_init__(self):
        matrix = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, 'matrix', matrix)
        if self.chart is None:
            object.__setattr__(self, 'chart', self.point.chart)
        n = self.point.rep.n
        if len(matrix) != self.ell or any(len(row) != n for row in matrix):
            raise PreconditionViolated(f'quotient matrix at {self.point} is not {self.ell}x{n}')
        if _rank(self.point.field, matrix) != self.ell:
            raise PreconditionViolated(f'quotient matrix at {self.point} does not have rank {self.ell}')

    @property
    def array(self):
        return np.array(self.matrix, dtype=np.int64).reshape(self.ell, self.point.rep.n)

    def apply(self, gradient):
        K = self.point.field.GF
        grad = K(np.array([g.value if isinstance(g, FqElem) else int(g) for g in gradient],
                          dtype=np.int64))
        if self.ell == 0:
            return np.zeros(0, dtype=np.int64)
        return as_ints(K(self.array) @ grad)


def transform_quotient(quotient, chart):
    """The same quotient with gradients read in another chart.

    With y the coordinates of the current chart a and w those of ``chart``,
    gradients transform by the transpose of J = dy/dw, so the matrix becomes
    ``Q (J^T)^-1``.
    """
    a, b = quotient.chart, chart
    if a == b:
        return quotient
    x = quotient.point
    K = x.field.GF
    w = [c.value for c in x.rep.in_chart(b)]
    F = x.field
    if not w[a]:
        raise PreconditionViolated(f'coordinate x{a} vanishes at {x}')
    inv_a = F.inv(w[a])
    inv_a2 = F.mul(inv_a, inv_a)
    rows = [i for i in range(len(w)) if i != a]
    cols = [k for k in range(len(w)) if k != b]
    J = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, i in enumerate(rows):
        for c, k in enumerate(cols):
            entry = inv_a if i == k else 0
            if k == a:
                entry = F.sub(entry, F.mul(w[i], inv_a2))
            J[r, c] = entry
    matrix = as_ints(K(quotient.array) @ np.linalg.inv(K(J).T))
    return QuotientAtPoint(x, quotient.ell, matrix, chart=b)


def taylor1_fiber(f, x, chart=None):
    """``(value, gradient)`` of f at x in the canonical chart (or ``chart``)."""
    jet = jet_at(f, x, 2, chart=chart)
    return jet.value, jet.gradient


def eval_quotient_condition(quotient, f):
    """True when f does not vanish in the fiber (value, Q . gradient) at the point."""
    value, gradient = taylor1_fiber(f, quotient.point, chart=quotient.chart)
    if value:
        return True
    return bool(np.any(quotient.apply(gradient)))


# quotient providers

class SmoothnessQuotient:
    """Ω¹ of a smooth scheme X: Q has the tangent space of X as its dual.

    The condition then says that H_f ∩ X is smooth of dimension m-1 at x
    or misses x.
    """

    name = 'smoothness'

    def __init__(self, scheme):
        self.scheme = scheme
        self.ell = scheme.dimension

    def quotient_at(self, x):
        return smoothness_quotient(self.scheme, x)

    def to_json(self):
        return {'provider': self.name}


def jacobian(scheme, x, chart=None):
    """Gradients of the dehomogenized equations of ``scheme`` at x, one row each."""
    rows = []
    for eq in scheme.equations:
        if eq.is_zero():
            continue
        jet = jet_at(eq, x, 2, chart=chart)
        rows.append([g.value for g in jet.gradient])
    return np.array(rows, dtype=np.int64).reshape(len(rows), scheme.n)


def smoothness_quotient(scheme, x):
    n, m = scheme.n, scheme.dimension
    J = jacobian(scheme, x)
    rank = _rank(x.field, J)
    if rank != n - m:
        raise SingularPoint(f'{scheme} is not smooth of dimension {m} at {x} '
                            f'(Jacobian rank {rank}, expected {n - m})')
    K = x.field.GF
    if rank == 0:
        matrix = as_ints(K.Identity(n))
    else:
        matrix = as_ints(K(J).null_space())
    return QuotientAtPoint(x, m, matrix)


@dataclass(frozen=True)
class ConicData:
    """The plane conic a x0² + b x0x1 + c x0x2 + d x1² + e x1x2 + f x2² over ``field``."""

    field: object
    coefficients: tuple
    gram: tuple
    smooth: bool

    @property
    def poly(self):
        return MPoly.from_coefficients(self.field, 3, 2, self.coefficients)

    def to_json(self):
        return {'coefficients': [list(FqElem(self.field, c).coeffs) for c in self.coefficients],
                'smooth': self.smooth}


def conic_through(Y, x):
    """The unique conic over κ(x) through the four points Y and x.

    :param Y: four rational :class:`~bertini_sieve.geom.ProjPoint` of P²
    :param x: a closed point of P²
    """
    K = x.field
    if K.p == 2:
        raise PreconditionViolated('conics need characteristic other than 2')
    if len(Y) != 4:
        raise PreconditionViolated(f'need four points, got {len(Y)}')
    points = [y.embed(build_embedding(y.field, K)).values for y in Y] + [x.rep.values]
    rows = []
    for point in points:
        row = []
        for exp in monomials(3, 2):
            value = 1
            for c, e in zip(point, exp):
                value = K.mul(value, K.power(c, e))
            row.append(value)
        rows.append(row)
    system = K.GF(np.array(rows, dtype=np.int64))
    rank = int(np.linalg.matrix_rank(system))
    if rank < 5:
        raise GeneralPositionError(f'the points {", ".join(str(y) for y in Y)} and {x} '
                                   f'impose only {rank} conditions on conics')
    kernel = as_ints(system.null_space())
    coefficients = _normalize_vector(K, kernel[0])
    a, b, c, d, e, f = coefficients
    half = K.inv(2)
    gram = np.array([[a, K.mul(b, half), K.mul(c, half)],
                     [K.mul(b, half), d, K.mul(e, half)],
                     [K.mul(c, half), K.mul(e, half), f]], dtype=np.int64)
    smooth = bool(np.linalg.det(K.GF(gram)) != 0)
    if not smooth:
        raise SingularPoint(f'the conic through {", ".join(str(y) for y in Y)} and {x} is singular')
    return ConicData(K, coefficients, tuple(map(tuple, gram.tolist())), smooth)


def conic_tangent_quotient(conic, x):
    """Rank one quotient pairing a gradient with the tangent direction of the conic."""
    if conic.field != x.field:
        raise FieldMismatch(f'conic over {conic.field} at a point with residue field {x.field}')
    jet = local_jet(conic.poly, x.rep.in_chart(x.chart), x.chart, 2)
    if jet.value:
        raise PreconditionViolated(f'the conic does not pass through {x}')
    gradient = np.array([g.value for g in jet.gradient], dtype=np.int64)
    if not gradient.any():
        raise SingularPoint(f'the conic is singular at {x}')
    kernel = as_ints(x.field.GF(gradient.reshape(1, -1)).null_space())
    tangent = _normalize_vector(x.field, kernel[0])
    return QuotientAtPoint(x, 1, (tangent,))


class ConicTangentQuotient:
    """At each x, the tangent line at x of the conic through Y and x."""

    name = 'conic'
    ell = 1

    def __init__(self, Y):
        self.Y = tuple(Y)

    def quotient_at(self, x):
        return conic_tangent_quotient(conic_through(self.Y, x), x)

    def to_json(self):
        return {'provider': self.name, 'points': [y.to_json() for y in self.Y]}


class ConstantQuotient:
    """A fixed matrix over F_q, optionally overridden at given rational points."""

    name = 'constant'

    def __init__(self, base, matrix, per_point=None):
        self.base = base
        self.matrix = np.array(matrix, dtype=np.int64)
        self.ell = self.matrix.shape[0]
        self.per_point = dict(per_point or {})

    def quotient_at(self, x):
        matrix = self.per_point.get(x.rep, self.matrix)
        emb = build_embedding(self.base, x.field)
        return QuotientAtPoint(x, self.ell, emb.apply_ints(np.asarray(matrix, dtype=np.int64)))

    def to_json(self):
        return {'provider': self.name, 'matrix': self.matrix.tolist()}


# conditions

class QuotientCondition:
    """Nonvanishing in the fiber of E_d at every closed point of ``carrier``."""

    kind = 'quotient_nonvanishing'

    def __init__(self, carrier, provider):
        self.carrier = carrier
        self.provider = provider
        self.ell = provider.ell
        self._cache = {}

    def applies(self, x):
        return x.parent is self.carrier or self.carrier.contains(x.rep)

    def quotient_at(self, x):
        if x not in self._cache:
            self._cache[x] = self.provider.quotient_at(x)
        return self._cache[x]

    def width(self, x):
        return self.ell + 1

    def local_probability(self, x):
        return 1 - Fraction(1, self.carrier.q ** ((self.ell + 1) * x.degree))

    def fiber_matrix(self, exponents, x):
        """``(N, ell+1)`` fiber images over κ(x) of the monomials ``exponents``."""
        quotient = self.quotient_at(x)
        values = x.rep.in_chart(quotient.chart)
        jets = monomial_jet_matrix(exponents, [c.value for c in values],
                                   quotient.chart, 2, x.field)
        K = x.field.GF
        image = as_ints(K(jets[:, 1:]) @ K(quotient.array).T) if self.ell else \
            np.zeros((jets.shape[0], 0), dtype=np.int64)
        return np.concatenate([jets[:, :1], image], axis=1)

    def satisfied(self, f, x):
        if not self.applies(x):
            return True
        return eval_quotient_condition(self.quotient_at(x), f)

    def to_json(self):
        return {'kind': self.kind, 'ell': self.ell, **self.provider.to_json()}


class JetCondition:
    """The jet of f at ``point`` to ``order`` lies in ``jets`` (or outside, for a complement)."""

    kind = 'jet_allowed_set'

    def __init__(self, point, order, jets, complement=False):
        for jet in jets:
            if jet.order != order or jet.center_field != point.field or jet.chart != point.chart:
                raise FieldMismatch(f'jet {jet.values} does not live at {point} to order {order}')
        self.point = point
        self.order = order
        self.jets = frozenset(jets)
        self.complement = complement

    @cached_property
    def allowed_values(self):
        return frozenset(jet.values for jet in self.jets)

    def width(self, x):
        return len(jet_exponents(self.point.rep.n, self.order))

    def local_probability(self, x):
        fraction = Fraction(len(self.jets), self.point.base.q ** (self.width(x) * x.degree))
        return 1 - fraction if self.complement else fraction

    def fiber_matrix(self, exponents, x):
        return monomial_jet_matrix(exponents, x.rep.values, x.chart, self.order, x.field)

    def satisfied(self, f, x):
        return eval_jet_condition(self.point, self.order, self.jets, f, self.complement)

    def to_json(self):
        return {'kind': self.kind, 'point': self.point.rep.to_json(), 'order': self.order,
                'complement': self.complement,
                'jets': [list(jet.values) for jet in sorted(self.jets, key=lambda j: j.values)]}


def eval_jet_condition(x, order, allowed, f, complement=False):
    """Whether the jet of f at x lies in ``allowed`` (flipped for a complement)."""
    for jet in allowed:
        if jet.order != order or jet.center_field != x.field:
            raise FieldMismatch(f'allowed jet of order {jet.order} over {jet.center_field} '
                                f'at {x} of order {order}')
    jet = jet_at(f, x, order)
    inside = any(jet.values == other.values for other in allowed)
    return inside != complement


class RestrictionCondition:
    """``f|_Z`` lies in T, Z a finite reduced set of closed points.

    :param points: closed points of Z
    :param charts: per point, a coordinate that does not vanish there
    :param allowed: tuples of encodings, one per point, over its residue field
    """

    kind = 'restriction_to_Z'

    def __init__(self, points, charts=None, allowed=()):
        self.points = tuple(points)
        self.charts = tuple(charts) if charts is not None else tuple(z.chart for z in self.points)
        if len(self.charts) != len(self.points):
            raise PreconditionViolated('one chart per point of Z is needed')
        for z, j in zip(self.points, self.charts):
            if not z.rep.values[j]:
                raise PreconditionViolated(f'coordinate x{j} vanishes at {z}')
        self.allowed = frozenset(tuple(int(v) for v in t) for t in allowed)

    @property
    def h0_size(self):
        return reduce(lambda acc, z: acc * z.field.q, self.points, 1)

    @property
    def local_probability(self):
        return Fraction(len(self.allowed), self.h0_size)

    def fiber_matrix(self, exponents, z, chart):
        values = [c.value for c in z.rep.in_chart(chart)]
        return monomial_jet_matrix(exponents, values, chart, 1, z.field)

    def satisfied(self, f):
        values = tuple(v.value for v in restrict_to_Z(f, self.points, self.charts))
        return values in self.allowed

    def to_json(self):
        return {'kind': self.kind, 'points': [z.rep.to_json() for z in self.points],
                'charts': list(self.charts), 'allowed': sorted(list(t) for t in self.allowed)}


def restrict_to_Z(f, points, charts=None):
    """Per point z of Z, the value of x_j^(-d) f at z's representative."""
    charts = charts if charts is not None else [z.chart for z in points]
    values = []
    for z, j in zip(points, charts):
        if not z.rep.values[j]:
            raise PreconditionViolated(f'coordinate x{j} vanishes at {z}')
        values.append(jet_at(f, z, 1, chart=j).value)
    return tuple(values)


@dataclass
class TaylorConditionSpec:
    """Conditions imposed together.

    Quotient conditions hold at the closed points of their carriers outside Z.
    At a point carrying an explicit jet condition that condition replaces the
    quotient conditions; the restriction to Z is checked on its own.
    """

    conditions: list = field(default_factory=list)

    @property
    def quotients(self):
        return [c for c in self.conditions if c.kind == 'quotient_nonvanishing']

    @property
    def restriction(self):
        return next((c for c in self.conditions if c.kind == 'restriction_to_Z'), None)

    @property
    def jet_conditions(self):
        return {c.point: c for c in self.conditions if c.kind == 'jet_allowed_set'}

    @property
    def carrier(self):
        quotients = self.quotients
        return quotients[0].carrier if quotients else None

    @property
    def ell(self):
        """Smallest quotient rank; it sets the medium band cutoff d/(ℓ+1)."""
        quotients = self.quotients
        if quotients:
            return min(c.ell for c in quotients)
        return max((c.point.rep.n for c in self.jet_conditions.values()), default=0)

    def conditions_at(self, x):
        restriction = self.restriction
        if restriction is not None and x in restriction.points:
            return []
        jets = self.jet_conditions
        if x in jets:
            return [jets[x]]
        return [c for c in self.quotients if c.applies(x)]

    def points(self, E, threads=None):
        """Closed points of degree <= E carrying a condition, by (degree, representative)."""
        found = set()
        for quotient in self.quotients:
            found.update(closed_points(quotient.carrier, E, threads))
        found.update(x for x in self.jet_conditions if x.degree <= E)
        return sorted((x for x in found if self.conditions_at(x)), key=lambda x: x.sort_key)

    def satisfied(self, f, E):
        if self.restriction and not self.restriction.satisfied(f):
            return False
        return all(c.satisfied(f, x) for x in self.points(E) for c in self.conditions_at(x))

    def to_json(self):
        return [c.to_json() for c in self.conditions]
