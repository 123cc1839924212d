"""
    bertini_sieve.sieve
    ~~~~~~~~~~~~~~~~~~~

    Probabilities that a random f in S_d satisfies a Taylor condition.

    Every target (a closed point with its fiber, or the finite subscheme Z)
    contributes a block of F_q-linear rows on the coefficient vectors of S_d.
    Stacking the blocks gives the evaluation map; exact probabilities come from
    its rank and image, exhaustive and Monte Carlo estimates from pushing
    coefficient vectors through it chunk by chunk.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exhaustive_budget, image_budget, rows_budget
from .exceptions import BudgetExceeded, InternalError, PreconditionViolated
from .geom import (ProjPoint, Subscheme, closed_point_counts_moebius,
                   closed_points_of_degree, euler_factor, zeta_inverse_truncated)
from .gf import FieldCtx, as_ints
from .mpoly import MPoly, jet_at, monomials, parse
from .runner import Runner
from .taylor import (ConicTangentQuotient, QuotientCondition, TaylorConditionSpec,
                     conic_through, conic_tangent_quotient)

logger = logging.getLogger('bertini_sieve')

RNG_ALGORITHM = 'philox4x64-10/seedsequence-spawn'
TRIAL_BLOCK = 4096

CSV_COLUMNS = ('d', 'mode', 'probability_num', 'probability_den', 'estimate', 'stderr',
               'prediction_num', 'prediction_den', 'low_fail', 'med_fail', 'high_fail',
               'surjective', 'seed', 'config_hash')


@dataclass
class Block:
    """Rows of the evaluation map belonging to one target.

    ``kind`` is ``nonzero`` (fiber must not vanish), ``allowed`` (image must be
    one of ``vectors``) or ``excluded`` (image must avoid ``vectors``).
    """

    kind: str
    label: str
    degree: int
    rows: np.ndarray
    local_probability: Fraction
    vectors: tuple = ()
    point: object = None

    @property
    def width(self):
        return self.rows.shape[0]

    def accepts(self, values):
        """Row mask of images in ``values`` (shape ``(P, width)``) meeting the condition."""
        if self.kind == 'nonzero':
            return np.any(values != 0, axis=1)
        inside = np.zeros(values.shape[0], dtype=bool)
        for vector in self.vectors:
            inside |= np.all(values == vector, axis=1)
        return inside if self.kind == 'allowed' else ~inside


@dataclass
class EvaluationMap:
    """The stacked blocks; ``matrix`` is ``rows x dim S_d`` over ``base``."""

    d: int
    base: FieldCtx
    nvars: int
    blocks: list

    @property
    def columns(self):
        return monomials(self.nvars, self.d)

    @property
    def matrix(self):
        if not self.blocks:
            return np.zeros((0, len(self.columns)), dtype=np.int64)
        return np.concatenate([block.rows for block in self.blocks], axis=0)

    @property
    def shape(self):
        return (sum(block.width for block in self.blocks), len(self.columns))

    def rank(self):
        matrix = self.matrix
        if matrix.size == 0:
            return 0
        return int(np.linalg.matrix_rank(self.base.GF(matrix)))

    def prediction(self):
        value = Fraction(1)
        for block in self.blocks:
            value *= block.local_probability
        return value

    def apply(self, coefficients):
        """Images of coefficient vectors, shape ``(P, rows)``."""
        GF = self.base.GF
        coefficients = np.asarray(coefficients, dtype=np.int64)
        if not self.blocks:
            return np.zeros((coefficients.shape[0], 0), dtype=np.int64)
        return as_ints(GF(coefficients) @ GF(self.matrix.T))


@dataclass
class SieveReport:
    """Outcome of one probability run at a single degree d."""

    mode: str
    d: int
    e: int
    E: int
    probability: Fraction = None
    estimate: float = None
    stderr: float = None
    prediction: Fraction = None
    band_failures: dict = field(default_factory=lambda: {'low': 0, 'med': 0, 'high': 0})
    sample_size: int = None
    seed: int = None
    rng: str = None
    surjective: bool = None
    rank: int = None
    config: dict = None
    config_hash: str = None

    def csv_row(self):
        prob = self.probability
        pred = self.prediction
        estimate = self.estimate if self.estimate is not None else (
            float(prob) if prob is not None else None)
        return {
            'd': self.d,
            'mode': self.mode,
            'probability_num': prob.numerator if prob is not None else '',
            'probability_den': prob.denominator if prob is not None else '',
            'estimate': '' if estimate is None else f'{estimate:.10f}',
            'stderr': '' if self.stderr is None else f'{self.stderr:.10f}',
            'prediction_num': pred.numerator if pred is not None else '',
            'prediction_den': pred.denominator if pred is not None else '',
            'low_fail': self.band_failures['low'],
            'med_fail': self.band_failures['med'],
            'high_fail': self.band_failures['high'],
            'surjective': '' if self.surjective is None else int(self.surjective),
            'seed': '' if self.seed is None else self.seed,
            'config_hash': self.config_hash or '',
        }

    def to_json(self):
        row = self.csv_row()
        row.update({'e': self.e, 'E': self.E, 'rank': self.rank, 'sample_size': self.sample_size,
                    'rng': self.rng, 'config': self.config, 'config_hash': self.config_hash})
        return row


# blocks

def _restrict(point, fiber):
    """F_q coordinates of a ``(N, w)`` fiber over κ(x), as ``w*deg`` rows."""
    coords = point.embedding.coordinates(fiber)
    return coords.reshape(fiber.shape[0], -1).T


def _point_block(condition, x, exponents):
    fiber = condition.fiber_matrix(exponents, x)
    rows = _restrict(x, fiber)
    label = str(x)
    if condition.kind == 'quotient_nonvanishing':
        return Block('nonzero', label, x.degree, rows,
                     condition.local_probability(x), point=x)
    vectors = tuple(x.embedding.coordinates(np.array(jet.values)).reshape(-1)
                    for jet in sorted(condition.jets, key=lambda jet: jet.values))
    kind = 'excluded' if condition.complement else 'allowed'
    return Block(kind, label, x.degree, rows, condition.local_probability(x), vectors, point=x)


def _restriction_block(restriction, exponents):
    rows = []
    for z, j in zip(restriction.points, restriction.charts):
        rows.append(_restrict(z, restriction.fiber_matrix(exponents, z, j)))
    vectors = []
    for allowed in sorted(restriction.allowed):
        parts = [z.embedding.coordinates(np.array([v])).reshape(-1)
                 for z, v in zip(restriction.points, allowed)]
        vectors.append(np.concatenate(parts))
    label = 'Z{' + ', '.join(str(z) for z in restriction.points) + '}'
    return Block('allowed', label, 0, np.concatenate(rows, axis=0),
                 restriction.local_probability, tuple(vectors))


def _nvars(spec):
    if spec.carrier is not None:
        return spec.carrier.n + 1
    points = list(spec.jet_conditions)
    if points:
        return points[0].rep.n + 1
    return spec.restriction.points[0].rep.n + 1


def _base(spec):
    if spec.carrier is not None:
        return spec.carrier.base
    points = list(spec.jet_conditions) or list(spec.restriction.points)
    return points[0].base


def _blocks(spec, d, points):
    exponents = np.array(monomials(_nvars(spec), d), dtype=np.int64)
    blocks = []
    if spec.restriction is not None:
        blocks.append(_restriction_block(spec.restriction, exponents))
    for x in points:
        blocks.extend(_point_block(condition, x, exponents) for condition in spec.conditions_at(x))
    rows = sum(block.width for block in blocks)
    budget = rows_budget()
    if rows > budget:
        raise BudgetExceeded(f'evaluation map at d={d} has {rows} rows, budget is {budget}')
    return blocks


def build_evaluation_map(spec, d, e, threads=None):
    """Evaluation map of S_d onto the fibers at targets of degree < e (and Z)."""
    if d < 0 or e < 1:
        raise PreconditionViolated(f'need d >= 0 and e >= 1, got d={d}, e={e}')
    points = spec.points(e - 1, threads) if e > 1 else []
    emap = EvaluationMap(d, _base(spec), _nvars(spec), _blocks(spec, d, points))
    logger.debug('Evaluation map at d=%s: %s', d, emap.shape)
    return emap


# exact probabilities

def _pivot_columns(GF, matrix):
    reduced = as_ints(GF(matrix).row_reduce())
    pivots = []
    for row in reduced:
        nonzero = np.flatnonzero(row)
        if nonzero.size:
            pivots.append(int(nonzero[0]))
    return pivots


def _accepting(blocks, images):
    ok = np.ones(images.shape[0], dtype=bool)
    start = 0
    for block in blocks:
        ok &= block.accepts(images[:, start:start + block.width])
        start += block.width
    return ok


def exact_low_probability(emap, threads=None):
    """Exact probability that f in S_d meets every block of ``emap``.

    When the map is surjective the blocks are independent and the answer is
    the product of their local probabilities. Otherwise the image is
    enumerated: each image vector has the same number of preimages.
    """
    base = emap.base
    rows, columns = emap.shape
    rank = emap.rank()
    report = SieveReport('exact', emap.d, None, None, rank=rank, surjective=rank == rows,
                         prediction=emap.prediction())
    if rank == rows:
        report.probability = emap.prediction()
        return report
    size = base.q ** rank
    budget = image_budget()
    if size > budget:
        raise BudgetExceeded(f'd={emap.d} is below the stability threshold: the image has '
                             f'{base.q}^{rank} elements, budget is {budget}')
    matrix = emap.matrix
    basis = matrix[:, _pivot_columns(base.GF, matrix)]
    GF = base.GF
    powers = base.q ** np.arange(rank - 1, -1, -1, dtype=np.int64)

    def count(start, stop):
        index = np.arange(start, stop, dtype=np.int64)
        u = (index[:, None] // powers) % base.q
        images = as_ints(GF(u) @ GF(basis.T)) if rank else \
            np.zeros((index.size, rows), dtype=np.int64)
        return int(_accepting(emap.blocks, images).sum())

    good = sum(Runner(threads=threads).map(count, size))
    report.probability = Fraction(good, size)
    return report


# enumeration over S_d

def _bands(d, e, ell):
    return e, d // (ell + 1)


def _band_of(degree, e, upper):
    if degree < e:
        return 'low'
    if degree <= upper:
        return 'med'
    return 'high'


class _Tally:
    """Per-chunk counts: survivors, first-failure degrees, failures per band per e."""

    def __init__(self, emap, E, d, ell, profile_es):
        self.emap = emap
        self.E = E
        self.d = d
        self.ell = ell
        self.profile_es = tuple(profile_es)

    def __call__(self, coefficients):
        images = self.emap.apply(coefficients)
        P = coefficients.shape[0]
        alive = np.ones(P, dtype=bool)
        first = np.zeros(self.E + 1, dtype=np.int64)
        fails_at = np.zeros((P, self.E + 1), dtype=bool)
        start = 0
        for block in self.emap.blocks:
            ok = block.accepts(images[:, start:start + block.width])
            start += block.width
            first[block.degree] += int((alive & ~ok).sum())
            fails_at[:, block.degree] |= ~ok
            alive &= ok
        upper = self.d // (self.ell + 1)
        somewhere = {}
        for e in self.profile_es:
            degrees = np.arange(self.E + 1)
            med = fails_at[:, (degrees >= e) & (degrees <= upper)].any(axis=1)
            high = fails_at[:, degrees > max(upper, e - 1)].any(axis=1)
            somewhere[e] = (int(med.sum()), int(high.sum()))
        return int(alive.sum()), first, somewhere


def _merge(results, E, profile_es):
    survivors = sum(r[0] for r in results)
    first = np.zeros(E + 1, dtype=np.int64)
    for r in results:
        first += r[1]
    somewhere = {e: tuple(sum(r[2][e][i] for r in results) for i in range(2)) for e in profile_es}
    return survivors, first, somewhere


def _band_failures(first, d, e, ell):
    low, upper = _bands(d, e, ell)
    counts = {'low': 0, 'med': 0, 'high': 0}
    for degree, count in enumerate(first):
        counts[_band_of(degree, low, upper)] += int(count)
    return counts


def _exhaustive_pass(spec, d, E, threads=None, profile_es=()):
    emap = EvaluationMap(d, _base(spec), _nvars(spec), _blocks(spec, d, spec.points(E, threads)))
    N = len(emap.columns)
    q = emap.base.q
    total = q ** N
    budget = exhaustive_budget()
    if total > budget:
        raise BudgetExceeded(f'S_{d} has {q}^{N} elements, budget is {budget}; '
                             f'use monte carlo mode instead')
    powers = q ** np.arange(N, dtype=np.int64)
    tally = _Tally(emap, E, d, spec.ell, profile_es)

    def chunk(start, stop):
        index = np.arange(start, stop, dtype=np.int64)
        return tally((index[:, None] // powers) % q)

    logger.info('Enumerating %s sections of degree %s against %s targets', total, d, len(emap.blocks))
    survivors, first, somewhere = _merge(Runner(threads=threads).map(chunk, total), E, profile_es)
    return emap, total, survivors, first, somewhere


def exhaustive_probability(spec, d, E, e=1, threads=None):
    """Exact fraction of f in S_d meeting the condition at every closed point of degree <= E."""
    emap, total, survivors, first, _ = _exhaustive_pass(spec, d, E, threads)
    return SieveReport(
        'exhaustive', d, e, E,
        probability=Fraction(survivors, total),
        prediction=emap.prediction(),
        band_failures=_band_failures(first, d, e, spec.ell),
        sample_size=total,
    )


def monte_carlo_probability(spec, d, E, trials, seed, e=1, threads=None):
    """Estimate from ``trials`` uniform samples of S_d.

    Trials run in blocks of :data:`TRIAL_BLOCK`; block ``i`` draws from a
    Philox generator seeded by the ``i``-th child of ``SeedSequence(seed)``, so
    the report depends on the seed only.
    """
    if trials < 1:
        raise PreconditionViolated(f'need at least one trial, got {trials}')
    emap = EvaluationMap(d, _base(spec), _nvars(spec), _blocks(spec, d, spec.points(E, threads)))
    N = len(emap.columns)
    q = emap.base.q
    children = np.random.SeedSequence(seed).spawn(-(-trials // TRIAL_BLOCK))
    tally = _Tally(emap, E, d, spec.ell, ())

    def chunk(start, stop):
        rng = np.random.Generator(np.random.Philox(children[start // TRIAL_BLOCK]))
        return tally(rng.integers(0, q, size=(stop - start, N), dtype=np.int64))

    runner = Runner(threads=threads, chunk=TRIAL_BLOCK)
    survivors, first, _ = _merge(runner.map(chunk, trials), E, ())
    estimate = survivors / trials
    return SieveReport(
        'monte_carlo', d, e, E,
        estimate=estimate,
        stderr=math.sqrt(estimate * (1 - estimate) / trials),
        prediction=emap.prediction(),
        band_failures=_band_failures(first, d, e, spec.ell),
        sample_size=trials,
        seed=seed,
        rng=RNG_ALGORITHM,
    )


def band_decomposition(spec, f, d, e, E):
    """Failing closed points of degree <= E split into the low, medium and high bands."""
    if e < 1 or E < e:
        raise PreconditionViolated(f'need 1 <= e <= E, got e={e}, E={E}')
    if not f.is_homogeneous(d):
        raise PreconditionViolated(f'{f} is not in S_{d}')
    low, upper = _bands(d, e, spec.ell)
    bands = {'low': [], 'med': [], 'high': []}
    for x in spec.points(E):
        if not all(c.satisfied(f, x) for c in spec.conditions_at(x)):
            bands[_band_of(x.degree, low, upper)].append(x)
    return bands['low'], bands['med'], bands['high']


def band_failure_profile(spec, d, E, es):
    """Per e, the fractions of S_d failing somewhere in the medium and in the high band."""
    _, total, _, _, somewhere = _exhaustive_pass(spec, d, E, profile_es=es)
    return {e: (Fraction(med, total), Fraction(high, total)) for e, (med, high) in somewhere.items()}


def medium_band_bound(X, ell, e, E):
    """c q^(e(m-ℓ-1)) / (1 - q^(m-ℓ-1)) with c = max c_r / q^(rm) over r <= E."""
    m = X.dimension
    if ell + 1 <= m:
        raise PreconditionViolated(f'the medium band bound needs ℓ >= m, got ℓ={ell}, m={m}')
    q = X.q
    counts = closed_point_counts_moebius(X, E)
    c = max(Fraction(count, q ** (r * m)) for r, count in counts)
    ratio = Fraction(q ** m, q ** (ell + 1))
    return c * ratio ** e / (1 - ratio)


def predicted_density(X, ell, E):
    """The truncated ζ_X(ℓ+1)^(-1)."""
    return zeta_inverse_truncated(X, ell + 1, E).value


@dataclass
class SurjectivityTable:
    rows: list
    threshold: int = None


def surjectivity_table(spec, e, d_range, threads=None):
    """Rank of the evaluation map per d, and the least d0 after which it stays surjective."""
    rows = []
    for d in d_range:
        emap = build_evaluation_map(spec, d, e, threads)
        rank = emap.rank()
        rows.append((d, rank, emap.shape[0], rank == emap.shape[0]))
    threshold = None
    for d, _, _, surjective in reversed(rows):
        if not surjective:
            break
        threshold = d
    last = None
    for d, _, _, surjective in rows:
        if surjective:
            last = d
        elif last is not None:
            logger.warning('Evaluation map surjective at d=%s but not at d=%s', last, d)
    logger.info('Surjectivity threshold for e=%s: %s', e, threshold)
    return SurjectivityTable(rows, threshold)


# the diagonal counterexample

@dataclass
class DiagonalReport:
    """``empty[d]`` holds when every section of degree d got its own closed point.

    ``rechecked_sample`` counts the pairs whose excluded jet was recomputed with
    :func:`~bertini_sieve.mpoly.jet_at`; the others rely on the vectorised jets.
    """

    n: int
    q: int
    d_max: int
    E: int
    sections: dict
    points_used: int
    max_degree: int
    empty: dict
    rechecked_sample: int
    local_product: Fraction
    limit: Fraction


def _sections(base, nvars, d):
    """Coefficient vectors of S_d in lex order."""
    N = len(monomials(nvars, d))
    q = base.q
    index = np.arange(q ** N, dtype=np.int64)
    digits = (index[:, None] // q ** np.arange(N - 1, -1, -1, dtype=np.int64)) % q
    return base.lex_order[digits]


def _order2_jets(base, exponents, coefficients, points, chart):
    """Jets of order 2 of the pairs (coefficients[i], points[i]) in ``chart``."""
    K = points[0].field
    GF = K.GF
    emb = points[0].embedding
    values = np.array([p.rep.values for p in points], dtype=np.int64)
    P, nvars = values.shape
    top = int(exponents.max()) if exponents.size else 0
    coeffs = GF(emb.apply_ints(coefficients))
    tables = []
    for i in range(nvars):
        column = GF(values[:, i])
        table = [GF.Ones(P)]
        for _ in range(top):
            table.append(table[-1] * column)
        tables.append(GF(np.stack([as_ints(t) for t in table], axis=1)))

    def monomial(skip=None):
        out = GF.Ones((P, exponents.shape[0]))
        for i in range(nvars):
            if i == chart or i == skip:
                continue
            out = out * tables[i][:, exponents[:, i]]
        return out

    columns = [np.add.reduce(coeffs * monomial(), axis=1)]
    for i in range(nvars):
        if i == chart:
            continue
        lowered = np.maximum(exponents[:, i] - 1, 0)
        factor = GF((exponents[:, i] % K.p)) * tables[i][:, lowered]
        columns.append(np.add.reduce(coeffs * factor * monomial(skip=i), axis=1))
    return np.stack([as_ints(c) for c in columns], axis=1)


def diagonal_counterexample(n, q, d_max, E=8, sample=32, threads=None):
    """Pair every section of degree <= d_max with its own closed point and exclude its jet.

    Sections f_1, f_2, ... run through S_0, S_1, ... in lex order and closed
    points x_1, x_2, ... through P^n by (degree, representative). The
    condition at x_i forbids exactly the order 2 jet of f_i (chart
    normalized), so each f_i fails at x_i and no P_d has an element, while the
    product of the local probabilities is the Euler product of P^n at n+1.
    """
    base = FieldCtx.from_order(q)
    X = Subscheme.projective_space(base, n)
    nvars = n + 1
    sections = {d: _sections(base, nvars, d) for d in range(d_max + 1)}
    needed = sum(s.shape[0] for s in sections.values())
    counts = []
    total, r = 0, 0
    while total < needed:
        r += 1
        counts.append(closed_point_counts_moebius(X, r)[-1][1])
        total += counts[-1]
    logger.info('Diagonal pairing of %s sections needs closed points up to degree %s', needed, r)
    points = []
    for degree in range(1, r + 1):
        points.extend(closed_points_of_degree(X, degree, threads))
        if len(points) >= needed:
            break
    points = points[:needed]

    empty = {}
    rechecked = 0
    i = 0
    for d in range(d_max + 1):
        exponents = np.array(monomials(nvars, d), dtype=np.int64)
        coeffs = sections[d]
        pairs = points[i:i + coeffs.shape[0]]
        excluded = np.zeros((coeffs.shape[0], nvars), dtype=np.int64)
        groups = {}
        for index, x in enumerate(pairs):
            groups.setdefault((x.degree, x.chart), []).append(index)
        for (degree, chart), members in groups.items():
            members = np.array(members)
            excluded[members] = _order2_jets(base, exponents, coeffs[members],
                                             [pairs[m] for m in members], chart)
        # every f_i fails at x_i: its jet recomputed independently is the excluded one
        step = max(1, len(pairs) // sample)
        for index in range(0, len(pairs), step):
            f = MPoly.from_coefficients(base, nvars, d, coeffs[index])
            jet = jet_at(f, pairs[index], 2)
            if jet.values != tuple(int(v) for v in excluded[index]):
                raise InternalError(f'jet of f_{i + index} at {pairs[index]} '
                                    f'does not match the excluded jet')
            rechecked += 1
        empty[d] = len(pairs) == coeffs.shape[0]
        i += coeffs.shape[0]

    product = Fraction(1)
    for degree, c in closed_point_counts_moebius(X, E):
        product *= euler_factor(q, n + 1, degree) ** c
    limit = Fraction(1)
    for k in range(n + 1):
        limit *= 1 - Fraction(q ** k, q ** (n + 1))
    return DiagonalReport(n, q, d_max, E, {d: s.shape[0] for d, s in sections.items()},
                          len(points), points[-1].degree if points else 0, empty, rechecked,
                          product, limit)


# the conic transversality example

@dataclass
class ConicDemo:
    q: int
    conic: object
    point: object
    tangent: tuple
    report: SieveReport
    prediction: Fraction


def transversality_setup(q):
    """U = the line x0 = 0 minus the four points where the lines through Y meet it."""
    base = FieldCtx.from_order(q)
    if base.p == 2:
        raise PreconditionViolated('conic transversality needs odd characteristic')
    line = parse('x0', 3, base)
    removed = [ProjPoint.normalized(base, v) for v in
               ((0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, base.neg(1)))]
    U = Subscheme(base, 2, [line], excluded=removed, dimension=1, name='U')
    Y = [ProjPoint(base, v) for v in ((1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1))]
    spec = TaylorConditionSpec([QuotientCondition(U, ConicTangentQuotient(Y))])
    return U, Y, spec


def conic_demo(q=5, d=3, e=2, E=None):
    """Conic through Y and the first rational point of U, and the exact low probability."""
    U, Y, spec = transversality_setup(q)
    rational = closed_points_of_degree(U, 1)
    x = rational[0]
    conic = conic_through(Y, x)
    tangent = conic_tangent_quotient(conic, x).matrix[0]
    report = exact_low_probability(build_evaluation_map(spec, d, e))
    report.e = e
    return ConicDemo(q, conic, x, tangent, report, predicted_density(U, 1, E or max(e - 1, 1)))
