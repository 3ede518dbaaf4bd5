"""Estimating tables and measures from counts.

Posterior sampling
------------------
Dirichlet draws are produced as normalized Gamma variates so that results
depend only on ``(seed, draws)``:

1. ``rng = numpy.random.Generator(numpy.random.PCG64(seed))``
2. ``g = rng.standard_gamma(alpha, size=(draws, 4))`` with ``alpha`` in the
   cell order ``(00, 01, 10, 11)``; numpy draws these row-major using the
   Marsaglia-Tsang method.
3. Each row of ``g`` is divided by its sum.

Sampling is single-threaded, so output is identical for any thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyData, InvalidLevel, TooFewDraws
from .measures import DEFAULT_LOG_BASE, log_base_value
from .tables import ProbTable2x2

MEASURES = ("pmi_max_cell", "log_odds_ratio", "yule_y", "mi")
MIN_DRAWS = 1000


@dataclass(frozen=True)
class DirichletPrior:
    alpha00: float = 1.0
    alpha01: float = 1.0
    alpha10: float = 1.0
    alpha11: float = 1.0

    def __post_init__(self):
        if min(self.as_tuple()) <= 0:
            raise ValueError(f"Dirichlet pseudo-counts must be positive, got {self.as_tuple()}")

    def as_tuple(self):
        return (self.alpha00, self.alpha01, self.alpha10, self.alpha11)

    @classmethod
    def uniform(cls):
        return cls(1.0, 1.0, 1.0, 1.0)

    @classmethod
    def jeffreys(cls):
        return cls(0.5, 0.5, 0.5, 0.5)

    def mean_table(self):
        a = self.as_tuple()
        total = sum(a)
        return ProbTable2x2(*(v / total for v in a))


@dataclass(frozen=True)
class IntervalEstimate:
    """Posterior mean and equal-tailed credible interval from MC draws.

    ``excluded`` counts draws whose measure was not finite.
    """

    point: float
    lower: float
    upper: float
    level: float
    draws: int
    seed: int
    measure: str
    excluded: int = 0


def mle_table(C):
    if C.n == 0:
        raise EmptyData("cannot estimate a table from zero counts")
    n = C.n
    return ProbTable2x2(C.n00 / n, C.n01 / n, C.n10 / n, C.n11 / n)


def continuity_correct(C, c=0.5):
    """Add ``c`` to every cell; returns a tuple of floats ``(n00, n01, n10, n11)``."""
    if c < 0:
        raise ValueError(f"continuity correction must be >= 0, got {c}")
    return tuple(float(v) + c for v in C.as_tuple())


def dirichlet_posterior(C, prior=None):
    prior = prior or DirichletPrior.uniform()
    return DirichletPrior(*(a + n for a, n in zip(prior.as_tuple(), C.as_tuple())))


def sample_posterior_tables(C, prior, draws, seed):
    """``(draws, 4)`` array of posterior tables in cell order 00, 01, 10, 11."""
    alpha = np.asarray(dirichlet_posterior(C, prior).as_tuple(), dtype=float)
    rng = np.random.Generator(np.random.PCG64(seed))
    g = rng.standard_gamma(alpha, size=(draws, 4))
    # rows where every variate underflowed become nan and are screened out later
    with np.errstate(invalid="ignore"):
        return g / g.sum(axis=1, keepdims=True)


def evaluate_measure(tables, measure, log_base=DEFAULT_LOG_BASE):
    """Evaluate ``measure`` row-wise on an ``(m, 4)`` array of tables.

    Degenerate rows give ``nan`` or ``+-inf``.
    """
    t = np.asarray(tables, dtype=float)
    p00, p01, p10, p11 = t.T
    rows = (p00 + p01, p10 + p11)
    cols = (p00 + p10, p01 + p11)
    ln_base = np.log(log_base_value(log_base))
    with np.errstate(divide="ignore", invalid="ignore"):
        if measure == "log_odds_ratio":
            return np.log(p00) + np.log(p11) - np.log(p01) - np.log(p10)
        if measure == "yule_y":
            s = np.sqrt(p00 * p11)
            r = np.sqrt(p01 * p10)
            return (s - r) / (s + r)
        cells = ((p00, 0, 0), (p01, 0, 1), (p10, 1, 0), (p11, 1, 1))
        if measure == "pmi_max_cell":
            vals = [np.log(p / (rows[i] * cols[j])) for p, i, j in cells]
            return np.max(vals, axis=0) / ln_base
        if measure == "mi":
            terms = [
                np.where(p > 0, p * np.log(p / (rows[i] * cols[j])), 0.0) for p, i, j in cells
            ]
            return np.maximum(np.sum(terms, axis=0), 0.0) / ln_base
    raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")


def posterior_measure_interval(
    C,
    prior=None,
    measure="pmi_max_cell",
    level=0.95,
    draws=10_000,
    seed=0,
    log_base=DEFAULT_LOG_BASE,
):
    """Monte Carlo posterior mean and equal-tailed interval for a measure.

    ``log_odds_ratio`` is always in natural log; ``log_base`` applies to
    ``pmi_max_cell`` and ``mi``.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if draws < MIN_DRAWS:
        raise TooFewDraws(f"need at least {MIN_DRAWS} draws, got {draws}")
    if not 0 < level < 1:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    prior = prior or DirichletPrior.uniform()
    samples = sample_posterior_tables(C, prior, draws, seed)
    values = evaluate_measure(samples, measure, log_base)
    finite = values[np.isfinite(values)]
    excluded = int(values.size - finite.size)
    if finite.size == 0:
        raise EmptyData("every posterior draw gave a non-finite measure")
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(finite, [tail, 1.0 - tail])
    return IntervalEstimate(
        point=float(finite.mean()),
        lower=float(lower),
        upper=float(upper),
        level=float(level),
        draws=int(draws),
        seed=int(seed),
        measure=measure,
        excluded=excluded,
    )

