"""Value types and exact algebra for 2x2 tables.

Cells are indexed ``p[row][col]`` with row = state of X and col = state of Y,
so ``p01 = p(X=0, Y=1)``.  The "event" x is X=1 and y is Y=1, which makes
``p11`` the joint event.

For Yule's smallpox data the convention used throughout is

=============  =======  =====
               recover  die
=============  =======  =====
vaccinated     p00      p01
unvaccinated   p10      p11
=============  =======  =====

so ``make_prob_table(0.840, 0.043, 0.059, 0.058)`` is the published table and
the rare joint event (unvaccinated, die) sits in cell (1, 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateTable,
    InfeasibleD,
    NegativeEntry,
    NoValidRoot,
    NonPositiveLambda,
    NonPositiveScale,
    ZeroTable,
)

SUM_TOL = 1e-12
CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class ProbTable2x2:
    """Normalized joint distribution of two binary variables."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        vals = (self.p00, self.p01, self.p10, self.p11)
        if any(not math.isfinite(v) for v in vals):
            raise NegativeEntry(f"non-finite entry in {vals}")
        if min(vals) < 0:
            raise NegativeEntry(f"negative entry in {vals}")
        if abs(math.fsum(vals) - 1.0) > SUM_TOL:
            raise ValueError(f"entries sum to {math.fsum(vals)!r}, not 1")

    def __getitem__(self, cell):
        row, col = cell
        return (self.p00, self.p01, self.p10, self.p11)[2 * row + col]

    def as_tuple(self):
        return (self.p00, self.p01, self.p10, self.p11)

    def as_array(self):
        """2x2 numpy array ``[[p00, p01], [p10, p11]]``."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    def row(self, i):
        """p(X=i)."""
        return self.p10 + self.p11 if i else self.p00 + self.p01

    def col(self, j):
        """p(Y=j)."""
        return self.p01 + self.p11 if j else self.p00 + self.p10

    @property
    def p_row1(self):
        return self.row(1)

    @property
    def p_col1(self):
        return self.col(1)

    def transpose(self):
        return ProbTable2x2(self.p00, self.p10, self.p01, self.p11)

    def swap_rows(self):
        return ProbTable2x2(self.p10, self.p11, self.p00, self.p01)

    def swap_cols(self):
        return ProbTable2x2(self.p01, self.p00, self.p11, self.p10)


@dataclass(frozen=True)
class CountTable2x2:
    """Raw cell counts; ``n`` is derived."""

    n00: int
    n01: int
    n10: int
    n11: int

    def __post_init__(self):
        vals = self.as_tuple()
        if any(int(v) != v for v in vals):
            raise ValueError(f"counts must be integers, got {vals}")
        if min(vals) < 0:
            raise NegativeEntry(f"negative count in {vals}")

    @property
    def n(self):
        return self.n00 + self.n01 + self.n10 + self.n11

    def __getitem__(self, cell):
        row, col = cell
        return self.as_tuple()[2 * row + col]

    def as_tuple(self):
        return (self.n00, self.n01, self.n10, self.n11)

    def __add__(self, other):
        return CountTable2x2(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    @property
    def row1_total(self):
        return self.n10 + self.n11

    @property
    def col1_total(self):
        return self.n01 + self.n11


class OddsState(enum.Enum):
    FINITE = "finite"
    ZERO = "zero"
    INFINITE = "infinite"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class OddsRatio:
    """Odds ratio with its degenerate cases kept explicit.

    ``value`` is ``0.0`` for ZERO, ``inf`` for INFINITE and ``nan`` for
    UNDEFINED.
    """

    value: float
    state: OddsState

    @classmethod
    def of(cls, value):
        value = float(value)
        if math.isnan(value):
            return cls(math.nan, OddsState.UNDEFINED)
        if value < 0:
            raise NonPositiveLambda(f"odds ratio must be >= 0, got {value}")
        if value == 0:
            return cls(0.0, OddsState.ZERO)
        if math.isinf(value):
            return cls(math.inf, OddsState.INFINITE)
        return cls(value, OddsState.FINITE)

    @property
    def is_defined(self):
        return self.state is not OddsState.UNDEFINED

    def __float__(self):
        return self.value


def make_prob_table(p00, p01, p10, p11):
    """Build a table from non-negative weights, dividing by their sum."""
    vals = [float(v) for v in (p00, p01, p10, p11)]
    if any(v < 0 for v in vals):
        raise NegativeEntry(f"negative entry in {vals}")
    if any(not math.isfinite(v) for v in vals):
        raise NegativeEntry(f"non-finite entry in {vals}")
    total = math.fsum(vals)
    if total == 0:
        raise ZeroTable("all four entries are zero")
    return ProbTable2x2(*(v / total for v in vals))


def uniform_table():
    return ProbTable2x2(0.25, 0.25, 0.25, 0.25)


def marginals(P):
    """Return ``(p(X=1), p(Y=1))``."""
    return P.row(1), P.col(1)


def odds_ratio(P):
    num = P.p00 * P.p11
    den = P.p01 * P.p10
    if den == 0:
        return OddsRatio.of(math.nan if num == 0 else math.inf)
    return OddsRatio.of(num / den)


def margin_manipulate(P, mu, nu):
    """Rescale row 0 by ``mu`` and column 0 by ``nu``, then renormalize.

    The odds ratio is unchanged.
    """
    if not (mu > 0 and nu > 0):
        raise NonPositiveScale(f"mu and nu must be positive, got {mu}, {nu}")
    return make_prob_table(mu * nu * P.p00, mu * P.p01, nu * P.p10, P.p11)


def canonical_from_lambda(lam):
    """Table with both marginals 1/2 and odds ratio ``lam``."""
    lam = float(lam)
    if not (0 < lam < math.inf):
        raise DegenerateTable(f"canonical table needs a finite positive odds ratio, got {lam}")
    s = math.sqrt(lam)
    diag = s / (2.0 * (1.0 + s))
    off = 1.0 / (2.0 * (1.0 + s))
    return ProbTable2x2(diag, off, off, diag)


def canonicalize(P):
    ratio = odds_ratio(P)
    if ratio.state is not OddsState.FINITE:
        raise DegenerateTable(f"table {P.as_tuple()} has a zero cell (odds ratio {ratio.state.value})")
    return canonical_from_lambda(ratio.value)


def coefficient_D(P):
    """Linkage-disequilibrium coefficient ``p00*p11 - p01*p10``."""
    return P.p00 * P.p11 - P.p01 * P.p10


def compose_from_margins_D(p_row1, p_col1, D):
    """Inverse of ``(marginals, coefficient_D)``."""
    r1, c1 = float(p_row1), float(p_col1)
    r0, c0 = 1.0 - r1, 1.0 - c1
    cells = (r0 * c0 + D, r0 * c1 - D, r1 * c0 - D, r1 * c1 + D)
    if min(cells) < -SUM_TOL or not (0 <= r1 <= 1 and 0 <= c1 <= 1):
        raise InfeasibleD(f"D={D} infeasible for marginals ({p_row1}, {p_col1})")
    return make_prob_table(*(max(c, 0.0) for c in cells))


def _joint_cell(p_x, p_y, lam):
    """Root ``t = p(x, y)`` of ``lam (p_x - t)(p_y - t) = t (1 - p_x - p_y + t)``.

    Written as ``a t^2 + b t + c = 0`` and solved in the cancellation-free
    form ``q = -(b + sign(b) sqrt(b^2 - 4ac)) / 2``, roots ``q/a`` and ``c/q``;
    the root inside ``[max(0, p_x + p_y - 1), min(p_x, p_y)]`` is returned.
    """
    a = lam - 1.0
    b = -(lam * (p_x + p_y) + (1.0 - p_x - p_y))
    c = lam * p_x * p_y
    lo, hi = max(0.0, p_x + p_y - 1.0), min(p_x, p_y)
    if c == 0:
        return 0.0
    q = -0.5 * (b + math.copysign(math.sqrt(max(b * b - 4.0 * a * c, 0.0)), b))
    roots = [c / q]
    if a != 0:
        roots.append(q / a)

    def distance(t):
        return max(lo - t, t - hi, 0.0)

    return min(roots, key=distance)


def table_from_margins_odds(p_x, p_y, lam):
    """The unique table with ``p(X=1)=p_x``, ``p(Y=1)=p_y`` and odds ratio ``lam``.

    Each cell solves its own quadratic (swapping a row or column inverts the
    odds ratio), so small cells keep full relative precision instead of being
    obtained by subtraction.
    """
    p_x, p_y, lam = float(p_x), float(p_y), float(lam)
    if not (0 < p_x < 1 and 0 < p_y < 1):
        raise ValueError(f"marginals must lie in (0, 1), got {p_x}, {p_y}")
    if not lam > 0:
        raise NonPositiveLambda(f"odds ratio must be positive, got {lam}")
    q_x, q_y = 1.0 - p_x, 1.0 - p_y
    if math.isinf(lam):
        t = min(p_x, p_y)
        return ProbTable2x2(max(q_x - (p_y - t), 0.0), p_y - t, p_x - t, t)
    cells = (
        _joint_cell(q_x, q_y, lam),
        _joint_cell(q_x, p_y, 1.0 / lam),
        _joint_cell(p_x, q_y, 1.0 / lam),
        _joint_cell(p_x, p_y, lam),
    )
    lo, hi = max(0.0, p_x + p_y - 1.0), min(p_x, p_y)
    if not (lo - 1e-12 <= cells[3] <= hi + 1e-12) or min(cells) < 0:
        raise NoValidRoot(f"root {cells[3]} outside ({lo}, {hi})")
    return make_prob_table(*cells)


def random_tables(count, seed, min_cell=1e-4):
    """Seeded random non-degenerate tables.

    Four independent uniform(0, 1) draws are normalized; tables with any cell
    below ``min_cell`` are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        u = rng.uniform(size=4)
        u = u / u.sum()
        if u.min() < min_cell:
            continue
        out.append(make_prob_table(*u))
    return out
