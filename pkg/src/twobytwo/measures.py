"""Measures of association for a single 2x2 probability table.

Logarithms default to base 2, in which PMI, MI and the canonical-table curves
all saturate at 1.  ``log_base`` accepts ``2``, ``10``, ``math.e`` or the
string ``"e"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .exceptions import (
    DegenerateMarginal,
    DegenerateTable,
    NonPositiveLambda,
    TableError,
    UndefinedOdds,
    UndefinedRatio,
)
from .tables import CELLS, OddsRatio, OddsState, coefficient_D, odds_ratio

DEFAULT_LOG_BASE = 2

# max_cell_pmi tie-break order
_PMI_CELL_ORDER = ((1, 1), (0, 0), (0, 1), (1, 0))
_TIE_TOL = 1e-12


def log_base_value(log_base):
    if log_base in ("e", "E"):
        return math.e
    base = float(log_base)
    if base not in (2.0, 10.0, math.e):
        raise ValueError(f"log_base must be one of 2, e, 10; got {log_base!r}")
    return base


def _ln_base(log_base):
    return math.log(log_base_value(log_base))


def _as_odds(lam):
    if isinstance(lam, OddsRatio):
        return lam
    return OddsRatio.of(lam)


# -- classical measures ---------------------------------------------------


def yule_y(lam):
    """Yule's coefficient of colligation ``(sqrt(l) - 1) / (sqrt(l) + 1)``."""
    lam = _as_odds(lam)
    if lam.state is OddsState.UNDEFINED:
        raise UndefinedOdds("Yule's Y is undefined when the odds ratio is 0/0")
    if lam.state is OddsState.ZERO:
        return -1.0
    if lam.state is OddsState.INFINITE:
        return 1.0
    if lam.value < 1.0:
        # evaluated on 1/lam so that Y(1/lam) == -Y(lam) exactly
        return -yule_y(1.0 / lam.value)
    s = math.sqrt(lam.value)
    return (s - 1.0) / (s + 1.0)


def yule_q(lam):
    """Yule's Q, ``(l - 1) / (l + 1)``."""
    lam = _as_odds(lam)
    if lam.state is OddsState.UNDEFINED:
        raise UndefinedOdds("Yule's Q is undefined when the odds ratio is 0/0")
    if lam.state is OddsState.ZERO:
        return -1.0
    if lam.state is OddsState.INFINITE:
        return 1.0
    if lam.value < 1.0:
        return -yule_q(1.0 / lam.value)
    return (lam.value - 1.0) / (lam.value + 1.0)


def _check_margins(P):
    for i in (0, 1):
        if not (0 < P.row(i) < 1 and 0 < P.col(i) < 1):
            raise DegenerateMarginal(f"marginal equal to 0 or 1 in {P.as_tuple()}")


def lewontin_d_prime(P):
    """``D`` divided by the largest value it can reach given the marginals."""
    _check_margins(P)
    D = coefficient_D(P)
    if D > 0:
        d_max = min(P.row(1) * P.col(0), P.row(0) * P.col(1))
    elif D < 0:
        d_max = min(P.row(1) * P.col(1), P.row(0) * P.col(0))
    else:
        return 0.0
    return max(-1.0, min(1.0, D / d_max))


def binary_correlation(P):
    """Phi coefficient, ``D / sqrt(p0. p.0 p1. p.1)``."""
    _check_margins(P)
    D = coefficient_D(P)
    r = D / math.sqrt(P.row(0) * P.col(0) * P.row(1) * P.col(1))
    return max(-1.0, min(1.0, r))


# -- information-theoretic measures ---------------------------------------


def _cell_margins(P, cell):
    row, col = cell
    p_row, p_col = P.row(row), P.col(col)
    if p_row <= 0 or p_col <= 0:
        raise DegenerateMarginal(f"cell {cell} has a zero marginal in {P.as_tuple()}")
    return P[cell], p_row, p_col


def pmi(P, cell=(1, 1), log_base=DEFAULT_LOG_BASE):
    """Pointwise mutual information of one cell; ``-inf`` for an empty cell."""
    p, p_row, p_col = _cell_margins(P, cell)
    if p == 0:
        return -math.inf
    return math.log(p / (p_row * p_col)) / _ln_base(log_base)


def max_cell_pmi(P, log_base=DEFAULT_LOG_BASE):
    """Largest PMI over the four cells and the cell achieving it.

    Ties (within 1e-12) go to (1,1), then (0,0), (0,1), (1,0).
    """
    _check_margins(P)
    best, best_cell = None, None
    for cell in _PMI_CELL_ORDER:
        v = pmi(P, cell, log_base)
        if best is None or (v > best if math.isinf(best) else v > best + _TIE_TOL * max(1.0, abs(best))):
            best, best_cell = v, cell
    return best, best_cell


def npmi(P, cell=(1, 1)):
    """PMI divided by ``-log p(x,y)``; independent of the log base.

    Returns -1 for an empty cell (the lower end of the range) and +1 when the
    cell carries all the mass of both its marginals.
    """
    p, p_row, p_col = _cell_margins(P, cell)
    if p == 0:
        return -1.0
    if p == p_row == p_col:
        return 1.0
    value = math.log(p / (p_row * p_col)) / -math.log(p)
    return max(-1.0, min(1.0, value))


def _entropy(probs):
    return -math.fsum(p * math.log(p) for p in probs if p > 0)


def _mi_nats(P):
    terms = []
    for cell in CELLS:
        p = P[cell]
        if p > 0:
            terms.append(p * math.log(p / (P.row(cell[0]) * P.col(cell[1]))))
    return max(0.0, math.fsum(terms))


def mutual_information(P, log_base=DEFAULT_LOG_BASE):
    return _mi_nats(P) / _ln_base(log_base)


def joint_entropy(P, log_base=DEFAULT_LOG_BASE):
    return _entropy(P.as_tuple()) / _ln_base(log_base)


def nmi(P):
    """MI over the joint entropy, in [0, 1]."""
    h = _entropy(P.as_tuple())
    if h == 0:
        raise DegenerateTable(f"joint entropy is zero for {P.as_tuple()}")
    return min(1.0, _mi_nats(P) / h)


def signed_nmi(P):
    D = coefficient_D(P)
    return math.copysign(1.0, D) * nmi(P) if D != 0 else 0.0


def uncertainty_coefficients(P):
    """``(I/H(X), I/H(Y))``."""
    hx = _entropy((P.row(0), P.row(1)))
    hy = _entropy((P.col(0), P.col(1)))
    if hx == 0 or hy == 0:
        raise DegenerateMarginal(f"a marginal entropy is zero for {P.as_tuple()}")
    mi = _mi_nats(P)
    return min(1.0, mi / hx), min(1.0, mi / hy)


def rrr(P, cell=(1, 1)):
    """Relative reporting ratio ``p(x,y) / (p(x) p(y))``."""
    p, p_row, p_col = _cell_margins(P, cell)
    return p / (p_row * p_col)


def prr(P, cell=(1, 1)):
    """Proportional reporting ratio ``p(y|x) / p(y|not x)``.

    ``x`` is the row state of ``cell`` and ``y`` its column state.
    """
    row, col = cell
    p_x = P.row(row)
    if not 0 < p_x < 1:
        raise DegenerateMarginal(f"p(x) must lie in (0, 1), got {p_x}")
    given_x = P[cell] / p_x
    given_not_x = P[(1 - row, col)] / (1.0 - p_x)
    if given_not_x == 0:
        if given_x == 0:
            raise UndefinedRatio("both conditionals are zero")
        return math.inf
    return given_x / given_not_x


# -- canonical-table curves -----------------------------------------------


def _positive_lambda(lam):
    lam = float(lam)
    if not lam > 0:
        raise NonPositiveLambda(f"odds ratio must be positive, got {lam}")
    return lam


def i_lambda(lam, log_base=DEFAULT_LOG_BASE):
    """PMI of the canonical table, ``log(2 sqrt(l) / (1 + sqrt(l)))``.

    For ``l < 1`` the anti-diagonal cell is the larger one, which amounts to
    evaluating at ``1 / l``.
    """
    lam = _positive_lambda(lam)
    if lam < 1.0:
        lam = 1.0 / lam
    if math.isinf(lam):
        return math.log(2.0) / _ln_base(log_base)
    s = math.sqrt(lam)
    return (math.log(2.0) + math.log(s) - math.log1p(s)) / _ln_base(log_base)


def big_i_lambda(lam, log_base=DEFAULT_LOG_BASE):
    """Mutual information of the canonical table with odds ratio ``lam``."""
    lam = _positive_lambda(lam)
    if lam < 1.0:
        lam = 1.0 / lam
    if math.isinf(lam):
        return math.log(2.0) / _ln_base(log_base)
    s = math.sqrt(lam)
    value = s / (1.0 + s) * math.log(s) - math.log1p(s) + math.log(2.0)
    return max(0.0, value) / _ln_base(log_base)


# -- report ---------------------------------------------------------------


@dataclass(frozen=True)
class NA:
    """A measure that is not available for this table."""

    reason: str

    def __str__(self):
        return f"NA:{self.reason}"


@dataclass(frozen=True)
class MeasureReport:
    """Every implemented measure for one table.

    ``pmi`` is the maximum over the four cells; ``npmi``, ``rrr`` and ``prr``
    are evaluated on that same cell (``pmi_cell``).  Degenerate values are
    :class:`NA` instances rather than floats.
    """

    odds_ratio: object
    coefficient_d: float
    yule_y: object
    yule_q: object
    lewontin_d_prime: object
    binary_r: object
    pmi: object
    pmi_cell: tuple
    npmi: object
    mi: float
    nmi: object
    signed_nmi: object
    uncertainty_x: object
    uncertainty_y: object
    rrr: object
    prr: object
    log_base: object

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _guard(fn, *args):
    try:
        return fn(*args)
    except TableError as exc:
        return NA(exc.reason)


def full_report(P, log_base=DEFAULT_LOG_BASE):
    log_base_value(log_base)
    lam = odds_ratio(P)
    peak = _guard(max_cell_pmi, P, log_base)
    if isinstance(peak, NA):
        pmi_value, cell = peak, (1, 1)
    else:
        pmi_value, cell = peak
    unc = _guard(uncertainty_coefficients, P)
    unc_x, unc_y = (unc, unc) if isinstance(unc, NA) else unc
    return MeasureReport(
        odds_ratio=lam.value if lam.is_defined else NA(UndefinedOdds.reason),
        coefficient_d=coefficient_D(P),
        yule_y=_guard(yule_y, lam),
        yule_q=_guard(yule_q, lam),
        lewontin_d_prime=_guard(lewontin_d_prime, P),
        binary_r=_guard(binary_correlation, P),
        pmi=pmi_value,
        pmi_cell=cell,
        npmi=_guard(npmi, P, cell),
        mi=mutual_information(P, log_base),
        nmi=_guard(nmi, P),
        signed_nmi=_guard(signed_nmi, P),
        uncertainty_x=unc_x,
        uncertainty_y=unc_y,
        rrr=_guard(rrr, P, cell),
        prr=_guard(prr, P, cell),
        log_base=log_base,
    )
