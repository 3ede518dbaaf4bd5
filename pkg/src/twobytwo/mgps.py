"""Multi-item Gamma Poisson Shrinker.

Model: the joint count ``n`` of a pair is Poisson with mean ``rho * e`` where
``e`` is the count expected under independence, and ``rho`` has a
two-component Gamma mixture prior.

.. note:: Every Gamma here is parameterized by **shape and rate**:
   ``Gamma(alpha, beta)`` has density ``beta^alpha rho^(alpha-1) e^(-beta rho) / G(alpha)``
   and mean ``alpha / beta``.  scipy.stats uses shape/*scale*; pass
   ``scale=1/beta`` there.

Integrating ``rho`` out gives a negative binomial marginal per component; the
posterior of ``rho`` is again a Gamma mixture, with component ``k`` updated to
``Gamma(alpha_k + n, beta_k + e)`` and weight proportional to ``w_k NB_k(n)``.
The shrunk score is the posterior mean of ``log rho``,
``sum_k w~_k (digamma(alpha_k + n) - ln(beta_k + e))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import digamma, expit, gammaln, logit, logsumexp

from .bayes import mle_table
from .exceptions import DegenerateMarginal, NonPositiveExpected, TooFewPairs
from .measures import DEFAULT_LOG_BASE, full_report, log_base_value

MIN_PAIRS = 10
MAX_ITER = 2000
REL_FTOL = 1e-9
# box on (log alpha, log beta) and logit w; a Gamma with shape e^12 is already
# a near point mass, so nothing useful lies beyond
LOG_BOUND = 12.0
LOGIT_BOUND = 25.0


@dataclass(frozen=True)
class GammaMixturePrior:
    """Shape/rate parameters of both components and the weight of component 1."""

    alpha1: float = 0.2
    beta1: float = 0.1
    alpha2: float = 2.0
    beta2: float = 4.0
    w: float = 1.0 / 3.0

    def __post_init__(self):
        if min(self.alpha1, self.beta1, self.alpha2, self.beta2) <= 0:
            raise ValueError(f"shapes and rates must be positive: {self}")
        if not 0 <= self.w <= 1:
            raise ValueError(f"mixture weight must lie in [0, 1], got {self.w}")

    def as_tuple(self):
        return (self.alpha1, self.beta1, self.alpha2, self.beta2, self.w)

    def mean_log(self, log_base=DEFAULT_LOG_BASE):
        """Prior mean of ``log rho``."""
        m1 = digamma(self.alpha1) - math.log(self.beta1)
        m2 = digamma(self.alpha2) - math.log(self.beta2)
        return float(self.w * m1 + (1.0 - self.w) * m2) / math.log(log_base_value(log_base))


DEFAULT_PRIOR = GammaMixturePrior()


@dataclass(frozen=True)
class ShrinkageResult:
    n: int
    e: float
    eb_log: float
    posterior_w1: float
    raw_log: float | None  # None when n == 0


@dataclass(frozen=True)
class FitDiagnostics:
    final_neg_log_likelihood: float
    iterations: int
    converged: bool
    restarts_used: int


def expected_count(C):
    """Count expected in cell (1,1) under independence."""
    n = C.n
    if n == 0 or C.row1_total == 0 or C.col1_total == 0:
        raise DegenerateMarginal(f"expected count needs positive margins, got {C.as_tuple()}")
    return C.row1_total * C.col1_total / n


def _log_nb(n, e, alpha, beta):
    """Log negative-binomial pmf of the Gamma(alpha, beta)-Poisson(rho e) marginal."""
    return (
        gammaln(alpha + n)
        - gammaln(alpha)
        - gammaln(n + 1.0)
        + alpha * (np.log(beta) - np.log(beta + e))
        + n * (np.log(e) - np.log(beta + e))
    )


def _component_logs(n, e, prior):
    n = np.asarray(n, dtype=float)
    e = np.asarray(e, dtype=float)
    with np.errstate(divide="ignore"):
        lw1, lw2 = np.log(prior.w), np.log1p(-prior.w)
    l1 = lw1 + _log_nb(n, e, prior.alpha1, prior.beta1)
    l2 = lw2 + _log_nb(n, e, prior.alpha2, prior.beta2)
    return l1, l2


def log_marginal_likelihood(n, e, prior):
    """Log of the mixture marginal probability of ``n`` (vectorized)."""
    l1, l2 = _component_logs(n, e, prior)
    return logsumexp(np.stack([l1, l2]), axis=0)


def nb_marginal_likelihood(n, e, prior):
    """Mixture marginal probability of observing ``n`` given ``e``."""
    if n < 0:
        raise ValueError(f"count must be >= 0, got {n}")
    if not e > 0:
        raise NonPositiveExpected(f"expected count must be positive, got {e}")
    return float(np.exp(log_marginal_likelihood(n, e, prior)))


def posterior_scores(n, e, prior, log_base=DEFAULT_LOG_BASE):
    """Vectorized ``(eb_log, posterior_w1)`` arrays."""
    n = np.asarray(n, dtype=float)
    e = np.asarray(e, dtype=float)
    l1, l2 = _component_logs(n, e, prior)
    post_w1 = np.exp(l1 - np.logaddexp(l1, l2))
    m1 = digamma(prior.alpha1 + n) - np.log(prior.beta1 + e)
    m2 = digamma(prior.alpha2 + n) - np.log(prior.beta2 + e)
    eb = (post_w1 * m1 + (1.0 - post_w1) * m2) / math.log(log_base_value(log_base))
    return eb, post_w1


def posterior_log_ratio(n, e, prior=DEFAULT_PRIOR, log_base=DEFAULT_LOG_BASE):
    if n < 0:
        raise ValueError(f"count must be >= 0, got {n}")
    if not e > 0:
        raise NonPositiveExpected(f"expected count must be positive, got {e}")
    eb, w1 = posterior_scores(n, e, prior, log_base)
    raw = math.log(n / e) / math.log(log_base_value(log_base)) if n > 0 else None
    return ShrinkageResult(n=int(n), e=float(e), eb_log=float(eb), posterior_w1=float(w1), raw_log=raw)


# -- hyperparameter fitting -----------------------------------------------


def _to_params(prior, pin_null):
    theta = [math.log(prior.alpha1), math.log(prior.beta1), math.log(prior.alpha2)]
    if not pin_null:
        theta.append(math.log(prior.beta2))
    w = min(max(prior.w, 1e-12), 1.0 - 1e-12)
    theta.append(float(logit(w)))
    return np.array(theta)


def _bounds(pin_null):
    k = 3 if pin_null else 4
    return [(-LOG_BOUND, LOG_BOUND)] * k + [(-LOGIT_BOUND, LOGIT_BOUND)]


def _from_params(theta, pin_null):
    a1, b1, a2 = np.exp(theta[:3])
    b2 = a2 if pin_null else math.exp(theta[3])
    w = float(expit(theta[-1]))
    w = min(max(w, 1e-15), 1.0 - 1e-15)
    return GammaMixturePrior(float(a1), float(b1), float(a2), float(b2), w)


def _sorted_pairs(pairs):
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if arr.shape[0] < MIN_PAIRS:
        raise TooFewPairs(f"need at least {MIN_PAIRS} pairs to fit, got {arr.shape[0]}")
    if np.any(arr[:, 1] <= 0) or not np.all(np.isfinite(arr)):
        raise NonPositiveExpected("every expected count must be positive and finite")
    if np.any(arr[:, 0] < 0):
        raise ValueError("counts must be non-negative")
    # fixed summation order makes the objective independent of input order
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return arr[order, 0], arr[order, 1]


def neg_log_likelihood(prior, n, e):
    return -float(np.sum(log_marginal_likelihood(n, e, prior)))


def fit_hyperparameters(pairs, init=DEFAULT_PRIOR, restarts=5, seed=0, pin_null=False):
    """Empirical-Bayes fit of the mixture prior by marginal likelihood.

    Nelder-Mead runs on ``(log a1, log b1, log a2, log b2, logit w)`` from
    ``init`` and then from ``restarts - 1`` points jittered around it with
    standard-normal noise from ``default_rng(seed)``.  The best start wins.
    With ``pin_null`` the second component is constrained to mean 1
    (``beta2 = alpha2``).

    Returns ``(prior, FitDiagnostics)``.
    """
    n, e = _sorted_pairs(pairs)
    restarts = max(1, int(restarts))
    rng = np.random.default_rng(seed)
    bounds = _bounds(pin_null)
    lo, hi = np.array(bounds).T
    theta0 = np.clip(_to_params(init, pin_null), lo, hi)

    # terms of the NB log pmf that do not depend on the prior
    const = n * np.log(e) - gammaln(n + 1.0)

    def objective(theta):
        p = _from_params(theta, pin_null)
        comps = []
        for log_w, a, b in ((math.log(p.w), p.alpha1, p.beta1), (math.log1p(-p.w), p.alpha2, p.beta2)):
            comps.append(
                log_w + gammaln(a + n) - gammaln(a) + a * math.log(b) - (a + n) * np.log(b + e) + const
            )
        value = -float(np.sum(np.logaddexp(comps[0], comps[1])))
        return value if math.isfinite(value) else 1e300

    starts = [theta0] + [
        np.clip(theta0 + rng.standard_normal(theta0.size), lo, hi) for _ in range(restarts - 1)
    ]
    best = None
    for start in starts:
        f0 = objective(start)
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "maxiter": MAX_ITER,
                "maxfev": 4 * MAX_ITER,
                "xatol": 1e-7,
                "fatol": REL_FTOL * max(1.0, abs(f0)),
                "adaptive": True,
            },
        )
        if best is None or res.fun < best.fun:
            best = res
    prior = _from_params(best.x, pin_null)
    diag = FitDiagnostics(
        final_neg_log_likelihood=float(best.fun),
        iterations=int(best.nit),
        converged=bool(best.success),
        restarts_used=len(starts),
    )
    return prior, diag


# -- batch screening ------------------------------------------------------


@dataclass(frozen=True)
class ScreenRow:
    """One screened pair; ``shrinkage`` is None when the table is degenerate."""

    pair: str
    table: object
    expected: float | None
    shrinkage: ShrinkageResult | None
    report: object
    flags: tuple = ()


def _labelled_tables(dataset):
    if hasattr(dataset, "labelled"):
        return dataset.labelled()
    return list(dataset)


def screen(dataset, prior=DEFAULT_PRIOR, log_base=DEFAULT_LOG_BASE, restarts=5, seed=0):
    """Score every pair by its shrunk log relative reporting ratio.

    ``dataset`` is a :class:`~twobytwo.ingest.PairDataset` or an iterable of
    ``(pair_id, CountTable2x2)``.  Pass ``prior="fit"`` to estimate the prior
    from the dataset first.  Rows are sorted by descending ``eb_log`` (ties by
    pair id); degenerate pairs are kept, flagged, and placed last.
    """
    entries = _labelled_tables(dataset)
    expected = {}
    for pair, table in entries:
        try:
            expected[pair] = expected_count(table)
        except DegenerateMarginal:
            expected[pair] = None
    if isinstance(prior, str):
        if prior != "fit":
            raise ValueError(f"prior must be a GammaMixturePrior or 'fit', got {prior!r}")
        pairs = [(t.n11, expected[p]) for p, t in entries if expected[p] is not None]
        prior, _ = fit_hyperparameters(pairs, restarts=restarts, seed=seed)

    rows = []
    for pair, table in entries:
        flags = []
        e = expected[pair]
        shrink = None
        if e is None:
            flags.append("degenerate_margin")
        else:
            shrink = posterior_log_ratio(table.n11, e, prior, log_base)
            if table.n11 == 0:
                flags.append("zero_joint")
        report = None
        if table.n > 0:
            report = full_report(mle_table(table), log_base)
        else:
            flags.append("empty_table")
        rows.append(ScreenRow(pair, table, e, shrink, report, tuple(flags)))
    rows.sort(key=lambda r: (r.shrinkage is None, -(r.shrinkage.eb_log if r.shrinkage else 0.0), r.pair))
    return rows
