"""
    bertini_sieve.mpoly
    ~~~~~~~~~~~~~~~~~~~

    Multivariate polynomials over a :class:`~bertini_sieve.gf.FieldCtx` and
    their jets.

    Terms are kept in graded-lex order with ``x0 > x1 > ...``; the same order
    indexes the monomial basis of S_d and therefore the columns of every
    evaluation matrix.
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .exceptions import FieldMismatch, ParseError, PreconditionViolated
from .gf import FqElem, as_ints

logger = logging.getLogger('bertini_sieve')


@lru_cache(maxsize=None)
def monomials(nvars, d):
    """Exponent vectors of total degree ``d`` in graded-lex order."""
    if nvars == 0:
        return ((),) if d == 0 else ()
    result = []
    for first in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - first):
            result.append((first,) + rest)
    return tuple(result)


@lru_cache(maxsize=None)
def jet_exponents(nvars, order):
    """Exponents of total degree below ``order``: the value, the gradient, ..."""
    return tuple(e for d in range(order) for e in monomials(nvars, d))


def _glex_key(exp):
    return (-sum(exp), tuple(-e for e in exp))


@lru_cache(maxsize=None)
def _binomials_mod_p(top, p):
    table = np.zeros((top + 1, top + 1), dtype=np.int64)
    for n in range(top + 1):
        for k in range(n + 1):
            table[n, k] = comb(n, k) % p
    return table


class MPoly:
    """A polynomial in ``nvars`` variables with coefficients in ``ctx``.

    :param ctx: coefficient field
    :param nvars: number of variables
    :param terms: mapping from exponent vectors to coefficients, given as
                  :class:`FqElem` or as integer encodings; zeros are dropped
    """

    def __init__(self, ctx, nvars, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise PreconditionViolated(f'bad exponent vector {exp} for {nvars} variables')
            if isinstance(coeff, FqElem):
                if coeff.ctx != ctx:
                    raise FieldMismatch(f'coefficient in {coeff.ctx}, expected {ctx}')
                coeff = coeff.value
            coeff = int(coeff)
            if not 0 <= coeff < ctx.q:
                raise PreconditionViolated(f'{coeff} does not encode an element of {ctx}')
            if coeff:
                clean[exp] = coeff
        self._terms = tuple(sorted(clean.items(), key=lambda kv: _glex_key(kv[0])))

    @classmethod
    def constant(cls, ctx, nvars, value):
        if isinstance(value, FqElem):
            value = value.value
        return cls(ctx, nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, ctx, nvars, i):
        exp = [0] * nvars
        exp[i] = 1
        return cls(ctx, nvars, {tuple(exp): 1})

    @classmethod
    def from_coefficients(cls, ctx, nvars, d, values):
        """The element of S_d with coefficient vector ``values``."""
        basis = monomials(nvars, d)
        if len(values) != len(basis):
            raise PreconditionViolated(f'S_{d} has dimension {len(basis)}, got {len(values)}')
        return cls(ctx, nvars, {exp: int(v) for exp, v in zip(basis, values)})

    @property
    def terms(self):
        return {exp: FqElem(self.ctx, c) for exp, c in self._terms}

    def items(self):
        """``(exponent, encoding)`` pairs in graded-lex order."""
        return self._terms

    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        if not self._terms:
            return -1
        return max(sum(exp) for exp, _ in self._terms)

    def is_homogeneous(self, d=None):
        degrees = {sum(exp) for exp, _ in self._terms}
        if d is None:
            return len(degrees) <= 1
        return degrees <= {d}

    def coefficient_vector(self, d):
        """Coefficient encodings over the monomials of S_d."""
        if not self.is_homogeneous(d):
            raise PreconditionViolated(f'{self} is not homogeneous of degree {d}')
        lookup = dict(self._terms)
        return np.array([lookup.get(exp, 0) for exp in monomials(self.nvars, d)],
                        dtype=np.int64)

    def coefficient(self, exp):
        return FqElem(self.ctx, dict(self._terms).get(tuple(exp), 0))

    # ring structure

    def _check(self, other):
        if not isinstance(other, MPoly):
            return False
        if other.ctx != self.ctx or other.nvars != self.nvars:
            raise FieldMismatch('polynomials over different rings')
        return True

    def _lift(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, FqElem):
            return MPoly.constant(self.ctx, self.nvars, other)
        if isinstance(other, (int, np.integer)):
            return MPoly.constant(self.ctx, self.nvars, int(other) % self.ctx.p)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        result = dict(self._terms)
        for exp, c in other._terms:
            result[exp] = self.ctx.add(result.get(exp, 0), c)
        return MPoly(self.ctx, self.nvars, result)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.ctx, self.nvars,
                     {exp: self.ctx.neg(c) for exp, c in self._terms})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        result = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                exp = tuple(a + b for a, b in zip(e1, e2))
                result[exp] = self.ctx.add(result.get(exp, 0), self.ctx.mul(c1, c2))
        return MPoly(self.ctx, self.nvars, result)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise PreconditionViolated('negative power of a polynomial')
        result = MPoly.constant(self.ctx, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return (self.ctx, self.nvars, self._terms) == (other.ctx, other.nvars, other._terms)

    def __hash__(self):
        return hash((self.ctx, self.nvars, self._terms))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f'MPoly({format_poly(self)!r} over {self.ctx!r})'


# parsing and formatting

_TOKEN = re.compile(r'\s*(?:(?P<int>\d+)|(?P<var>x\d+)|(?P<gen>t)|(?P<op>[-+*^()]))')


def _tokenize(src):
    tokens = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        if not match or match.end() == pos:
            offset = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f'unexpected character {src[offset]!r}', offset, src)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(('end', '', len(src)))
    return tokens


class _Parser:

    def __init__(self, src, nvars, ctx):
        self.src = src
        self.nvars = nvars
        self.ctx = ctx
        self.tokens = _tokenize(src)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text):
        kind, value, pos = self.current
        if value != text or kind != 'op':
            raise ParseError(f'expected {text!r}', pos, self.src)
        self.advance()

    def parse(self):
        poly = self.expr()
        kind, value, pos = self.current
        if kind != 'end':
            raise ParseError(f'unexpected {value!r}', pos, self.src)
        return poly

    def expr(self):
        poly = self.term()
        while self.current[:2] in (('op', '+'), ('op', '-')):
            _, op, _ = self.advance()
            rhs = self.term()
            poly = poly + rhs if op == '+' else poly - rhs
        return poly

    def term(self):
        poly = self.factor()
        while self.current[:2] == ('op', '*'):
            self.advance()
            poly = poly * self.factor()
        return poly

    def factor(self):
        if self.current[:2] == ('op', '-'):
            self.advance()
            return -self.factor()
        if self.current[:2] == ('op', '+'):
            self.advance()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.current[:2] == ('op', '^'):
            self.advance()
            kind, value, pos = self.advance()
            if kind != 'int':
                raise ParseError('exponent must be a non-negative integer', pos, self.src)
            base = base ** int(value)
        return base

    def atom(self):
        kind, value, pos = self.advance()
        if kind == 'int':
            return MPoly.constant(self.ctx, self.nvars, int(value) % self.ctx.p)
        if kind == 'var':
            index = int(value[1:])
            if index >= self.nvars:
                raise ParseError(f'variable {value} out of range for {self.nvars} variables',
                                 pos, self.src)
            return MPoly.variable(self.ctx, self.nvars, index)
        if kind == 'gen':
            if self.ctx.k == 1:
                raise ParseError(f'no generator symbol t in prime field {self.ctx}', pos, self.src)
            return MPoly.constant(self.ctx, self.nvars, self.ctx.generator)
        if (kind, value) == ('op', '('):
            poly = self.expr()
            self.expect(')')
            return poly
        raise ParseError(f'unexpected {value or "end of input"!r}', pos, self.src)


def parse(src, nvars, ctx):
    """Parse ``src`` over ``ctx`` in variables ``x0 .. x{nvars-1}``.

    Integer literals are read in the prime field; ``t`` denotes the generator
    of a non-prime field.
    """
    return _Parser(src, nvars, ctx).parse()


def _format_coefficient(ctx, value):
    if value < ctx.p:
        return str(value)
    parts = []
    for i, c in reversed(list(enumerate(ctx.digits(value)))):
        c = int(c)
        if not c:
            continue
        power = '' if i == 0 else ('t' if i == 1 else f't^{i}')
        if not power:
            parts.append(str(c))
        elif c == 1:
            parts.append(power)
        else:
            parts.append(f'{c}*{power}')
    return '(' + ' + '.join(parts) + ')'


def format_poly(f):
    """Canonical string of ``f``; ``parse(format_poly(f)) == f``."""
    if f.is_zero():
        return '0'
    out = []
    for exp, value in f.items():
        monomial = '*'.join(f'x{i}' if e == 1 else f'x{i}^{e}'
                            for i, e in enumerate(exp) if e)
        coeff = _format_coefficient(f.ctx, value)
        if not monomial:
            out.append(coeff)
        elif value == 1:
            out.append(monomial)
        else:
            out.append(f'{coeff}*{monomial}')
    return ' + '.join(out)


# evaluation and calculus

def _check_embedding(f, emb):
    if emb.source != f.ctx:
        raise FieldMismatch(f'embedding source {emb.source} is not {f.ctx}')


def evaluate(f, point, emb):
    """Value of ``f`` at ``point`` (FqElems over ``emb.target``)."""
    _check_embedding(f, emb)
    if len(point) != f.nvars:
        raise PreconditionViolated(f'point has {len(point)} coordinates, expected {f.nvars}')
    for c in point:
        if c.ctx != emb.target:
            raise FieldMismatch(f'coordinate in {c.ctx}, expected {emb.target}')
    result = emb.target.zero
    for exp, value in f.items():
        term = FqElem(emb.target, int(emb.table[value]))
        for c, e in zip(point, exp):
            if e:
                term = term * c ** e
        result = result + term
    return result


def evaluate_many(f, values, emb):
    """Vectorized :func:`evaluate`; ``values`` is an ``(P, nvars)`` array of encodings."""
    _check_embedding(f, emb)
    values = np.asarray(values, dtype=np.int64)
    K = emb.target.GF
    total = K.Zeros(values.shape[0])
    if f.is_zero():
        return as_ints(total)
    top = f.degree
    columns = [K(values[:, i]) for i in range(f.nvars)]
    powers = []
    for column in columns:
        table = [K.Ones(values.shape[0])]
        for _ in range(top):
            table.append(table[-1] * column)
        powers.append(table)
    for exp, value in f.items():
        term = K.Ones(values.shape[0]) * K(int(emb.table[value]))
        for i, e in enumerate(exp):
            if e:
                term = term * powers[i][e]
        total = total + term
    return as_ints(total)


def partial(f, i):
    """Formal partial derivative in ``x_i``."""
    if not 0 <= i < f.nvars:
        raise PreconditionViolated(f'variable index {i} out of range')
    result = {}
    for exp, value in f.items():
        if exp[i] % f.ctx.p:
            new = list(exp)
            new[i] -= 1
            result[tuple(new)] = f.ctx.scale(value, exp[i])
    return MPoly(f.ctx, f.nvars, result)


def dehomogenize(f, j):
    """Set ``x_j = 1``; the other variables keep their order."""
    if not f.is_homogeneous():
        raise PreconditionViolated(f'{f} is not homogeneous')
    if not 0 <= j < f.nvars:
        raise PreconditionViolated(f'chart index {j} out of range')
    return MPoly(f.ctx, f.nvars - 1,
                 {exp[:j] + exp[j + 1:]: value for exp, value in f.items()})


def base_change(f, emb):
    """Push the coefficients of ``f`` through ``emb``."""
    _check_embedding(f, emb)
    return MPoly(emb.target, f.nvars,
                 {exp: int(emb.table[value]) for exp, value in f.items()})


def translate(f, shift):
    """``f(y + shift)``, expanded with Hasse derivatives (exact in characteristic p)."""
    if len(shift) != f.nvars:
        raise PreconditionViolated(f'shift has {len(shift)} coordinates, expected {f.nvars}')
    ctx = f.ctx
    shift = [s.value if isinstance(s, FqElem) else int(s) for s in shift]
    binom = _binomials_mod_p(max(f.degree, 0), ctx.p)
    result = {}
    for exp, value in f.items():
        ranges = [range(e + 1) for e in exp]
        for beta in np.ndindex(*[len(r) for r in ranges]):
            coeff = value
            for a, b, s in zip(exp, beta, shift):
                coeff = ctx.scale(coeff, binom[a, b])
                if a - b:
                    coeff = ctx.mul(coeff, ctx.power(s, a - b))
                if not coeff:
                    break
            if coeff:
                result[beta] = ctx.add(result.get(beta, 0), coeff)
    return MPoly(ctx, f.nvars, result)


def truncate(f, order):
    """Drop every term of total degree ``>= order``."""
    return MPoly(f.ctx, f.nvars,
                 {exp: value for exp, value in f.items() if sum(exp) < order})


@dataclass(frozen=True)
class Jet:
    """Image of a section in O/m^order at a point, in an affine chart.

    ``values`` are encodings over ``center_field`` aligned with
    ``jet_exponents(nvars, order)``: first the value, then the gradient.
    """

    center_field: object
    order: int
    chart: int
    nvars: int
    values: tuple

    @classmethod
    def from_poly(cls, poly, order, chart):
        lookup = dict(poly.items())
        values = tuple(lookup.get(exp, 0) for exp in jet_exponents(poly.nvars, order))
        return cls(poly.ctx, order, chart, poly.nvars, values)

    @property
    def exponents(self):
        return jet_exponents(self.nvars, self.order)

    @property
    def coeffs(self):
        return {exp: FqElem(self.center_field, v) for exp, v in zip(self.exponents, self.values)}

    @property
    def value(self):
        return FqElem(self.center_field, self.values[0])

    @property
    def gradient(self):
        return tuple(FqElem(self.center_field, v) for v in self.values[1:1 + self.nvars])

    def is_zero(self):
        return not any(self.values)

    def to_poly(self):
        return MPoly(self.center_field, self.nvars, dict(zip(self.exponents, self.values)))

    def __mul__(self, other):
        if (other.center_field, other.order, other.chart, other.nvars) != \
                (self.center_field, self.order, self.chart, self.nvars):
            raise FieldMismatch('jets at different points or orders')
        return Jet.from_poly(truncate(self.to_poly() * other.to_poly(), self.order),
                             self.order, self.chart)


def jet_at(f, x, order, chart=None):
    """Jet of the homogeneous ``f`` at the closed point ``x`` to the given order.

    The chart is the smallest index with a nonvanishing coordinate at ``x``'s
    representative unless ``chart`` says otherwise; ``f`` is normalized by
    ``x_chart^(-d)``, base-changed to the residue field and translated to the
    origin.
    """
    j = x.chart if chart is None else chart
    return local_jet(base_change(f, x.embedding), x.rep.in_chart(j), j, order)


def local_jet(f, coords, chart, order):
    """Jet of ``f`` at ``coords``, both over the same field, with ``coords[chart] == 1``."""
    if order < 1:
        raise PreconditionViolated(f'jet order must be positive, got {order}')
    if not f.is_homogeneous():
        raise PreconditionViolated(f'{f} is not homogeneous')
    if coords[chart].value != 1:
        raise PreconditionViolated(f'point is not normalized in chart {chart}')
    g = dehomogenize(f, chart)
    shift = list(coords[:chart]) + list(coords[chart + 1:])
    return Jet.from_poly(truncate(translate(g, shift), order), order, chart)


def monomial_jet_matrix(exponents, point, chart, order, field):
    """Jets of every monomial at once.

    :param exponents: ``(N, n+1)`` exponent vectors of the monomials
    :param point: ``n+1`` encodings over ``field`` with ``point[chart] == 1``
    :param chart: the dehomogenizing coordinate
    :param order: jet order M
    :param field: the residue field
    :returns: ``(N, J)`` encodings, column ``b`` the coefficient of
              ``jet_exponents(n, order)[b]``
    """
    exps = np.asarray(exponents, dtype=np.int64)
    point = [int(v) for v in point]
    if point[chart] != 1:
        raise PreconditionViolated(f'point is not normalized in chart {chart}')
    K = field.GF
    others = [i for i in range(exps.shape[1]) if i != chart]
    top = int(exps.max()) if exps.size else 0
    binom = _binomials_mod_p(top, field.p)
    powers = {}
    for i in others:
        table = [1]
        for _ in range(top):
            table.append(field.mul(table[-1], point[i]))
        powers[i] = np.array(table, dtype=np.int64)
    columns = []
    for beta in jet_exponents(len(others), order):
        column = K.Ones(exps.shape[0])
        for b, i in zip(beta, others):
            diff = exps[:, i] - b
            valid = diff >= 0
            safe = np.where(valid, diff, 0)
            factor = binom[exps[:, i], np.minimum(b, top)] * valid
            column = column * K(factor % field.p) * K(powers[i][safe])
        columns.append(column)
    if not columns:
        return np.zeros((exps.shape[0], 0), dtype=np.int64)
    return as_ints(K(np.stack([as_ints(c) for c in columns], axis=1)))
